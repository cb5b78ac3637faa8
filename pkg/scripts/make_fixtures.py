#!/usr/bin/env python3
"""Generate a synthetic fixture (source file + ingest spec + SVG map).

Usage:
    python3 scripts/make_fixtures.py --which conflict --out /tmp/conflict
    python3 scripts/make_fixtures.py --which demo --out /tmp/demo --seed 5

The conflict fixture matches the shape used by the acceptance suite:
141 countries x 240 months x 60 indicators with two display tracks.
"""

from __future__ import annotations

import argparse
import sys
import time

from chronomap import fixtures

GENERATORS = {
    "conflict": fixtures.write_conflict_fixture,
    "pandemic": fixtures.write_pandemic_fixture,
    "demo": fixtures.write_demo_fixture,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--which", choices=sorted(GENERATORS), default="demo")
    parser.add_argument("--out", required=True, help="fixture output directory")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    kwargs = {} if args.seed is None else {"seed": args.seed}
    started = time.perf_counter()
    paths = GENERATORS[args.which](args.out, **kwargs)
    elapsed = time.perf_counter() - started
    print(f"{args.which} fixture in {elapsed:.1f}s", file=sys.stderr)
    print(f"data: {paths.data} ({paths.data.stat().st_size:,} bytes)")
    print(f"spec: {paths.spec}")
    print(f"map:  {paths.map}")
    print(f"next: chronomap ingest --spec {paths.spec} --in {paths.data} --out <store-dir>")
    return 0


if __name__ == "__main__":
    sys.exit(main())
