#!/usr/bin/env python3
"""Measure localhost payload latencies against a store, like the dashboard would.

Starts a throwaway server on an ephemeral port, then reports median and
p90 times over N requests for the summary, a spread of detail chunks, and
a computed frame.

Usage:
    python3 scripts/bench_load.py --data /tmp/conflict-store --map /tmp/conflict/map.svg
"""

from __future__ import annotations

import argparse
import statistics
import sys
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from chronomap.chunker import load_store
from chronomap.server import ServerConfig, create_app


def start_server(config: ServerConfig) -> tuple[uvicorn.Server, threading.Thread, int]:
    uv = uvicorn.Server(uvicorn.Config(create_app(config), host=config.host,
                                       port=0, log_level="error"))
    thread = threading.Thread(target=uv.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not uv.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    port = uv.servers[0].sockets[0].getsockname()[1]
    return uv, thread, port


def timed(client: httpx.Client, url: str, n: int) -> list[float]:
    times = []
    for _ in range(n):
        t0 = time.perf_counter()
        response = client.get(url)
        response.raise_for_status()
        times.append((time.perf_counter() - t0) * 1000)
    return times


def describe(label: str, times: list[float], size: int) -> None:
    times = sorted(times)
    p90 = times[int(len(times) * 0.9)] if len(times) > 1 else times[0]
    print(f"{label:<22} median {statistics.median(times):7.2f} ms   "
          f"p90 {p90:7.2f} ms   {size:>9,} bytes")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data", required=True, help="store directory")
    parser.add_argument("--map", required=True, help="SVG map file")
    parser.add_argument("--requests", type=int, default=20)
    args = parser.parse_args(argv)

    store = load_store(args.data)
    config = ServerConfig(data_dir=Path(args.data), map_path=Path(args.map))
    uv, thread, port = start_server(config)
    base = f"http://127.0.0.1:{port}"
    countries = store.chunk_countries()
    probe = [countries[i * len(countries) // 5] for i in range(min(5, len(countries)))]

    with httpx.Client() as client:
        summary = client.get(f"{base}/api/summary")
        describe("/api/summary", timed(client, f"{base}/api/summary", args.requests),
                 len(summary.content))
        for country in probe:
            url = f"{base}/api/detail/{country}"
            body = client.get(url)
            describe(f"/api/detail/{country}", timed(client, url, args.requests),
                     len(body.content))
        frame_url = f"{base}/api/frame/{store.axis.count - 1}"
        body = client.get(frame_url)
        describe("/api/frame (json)", timed(client, frame_url, args.requests),
                 len(body.content))

    uv.should_exit = True
    thread.join(timeout=5)
    return 0


if __name__ == "__main__":
    sys.exit(main())
