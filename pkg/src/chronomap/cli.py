"""Operator command line: ingest, validate, pack, serve, export-frames, stats.

Conventions: long-form --kebab-case flags only; progress goes to stderr,
data and JSON to stdout; exit 0 on success, 1 on user or data errors,
2 on internal failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import traceback
from pathlib import Path

from . import __version__, choropleth, server
from .chunker import SOFT_CHUNK_BUDGET, load_store, write_store
from .errors import ChronomapError, ReversedRange, UnknownTrack
from .ingest import IngestSpec, load, validate
from .model import PeriodAxis


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; here those are user errors (exit 1)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _read_spec(path: str, fmt: str | None, skip_bad_rows: bool) -> IngestSpec:
    spec = IngestSpec.from_json(Path(path).read_bytes())
    if fmt is not None:
        spec = dataclasses.replace(spec, format=fmt)
    if skip_bad_rows:
        spec = dataclasses.replace(spec, skip_bad_rows=True)
    return spec


def _cmd_ingest(args: argparse.Namespace) -> int:
    spec = _read_spec(args.spec, args.format, args.skip_bad_rows)
    _progress(f"reading {args.source} as {spec.format}")
    with open(args.source, "rb") as handle:
        result = load(handle, spec)
    report = validate(result.dataset, skipped_rows=result.skipped_rows)
    written = write_store(result.dataset, args.out, soft_budget=args.soft_budget)
    _progress(f"wrote {len(written.chunk_paths)} chunks to {args.out}")
    for warning in written.report.warnings:
        _progress(f"warning: {warning}")
    print(report.text())
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    spec = _read_spec(args.spec, args.format, args.skip_bad_rows)
    with open(args.source, "rb") as handle:
        result = load(handle, spec)
    report = validate(result.dataset, skipped_rows=result.skipped_rows)
    print(report.text(full=True))
    return 0 if report.ok else 1


def _cmd_pack(args: argparse.Namespace) -> int:
    dataset = load_store(args.data).reassemble()
    written = write_store(dataset, args.out, soft_budget=args.soft_budget)
    _progress(f"packed {len(written.chunk_paths)} chunks into {args.out}")
    print(written.report.text())
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    config = server.ServerConfig(
        data_dir=Path(args.data),
        map_path=Path(args.map),
        host=args.host,
        port=args.port,
        cors_origin=args.cors_origin,
        soft_budget=args.soft_budget,
    )
    load_store(config.data_dir)  # fail fast on a bad store before binding
    _progress(f"serving http://{config.host}:{config.port}")
    server.run(config)
    return 0


def _parse_bound(store_axis: PeriodAxis, text: str) -> int:
    """Accept either a bare ordinal or a calendar label for --from/--to."""
    try:
        ordinal = int(text)
    except ValueError:
        try:
            return store_axis.ordinal(text)
        except IndexError as exc:
            raise ReversedRange(str(exc)) from None
    if not 0 <= ordinal < store_axis.count:
        raise ReversedRange(f"ordinal {ordinal} outside 0..{store_axis.count - 1}")
    return ordinal


def _cmd_export_frames(args: argparse.Namespace) -> int:
    store = load_store(args.data)
    map_bytes = Path(args.map).read_bytes()
    track = args.track or store.tracks[0].name
    if track not in store.summary.tracks:
        raise UnknownTrack(f"track {track!r} is not in this store")
    kind = server.SCALE_KINDS.get(args.scale)
    if kind is None:
        raise UnknownTrack(f"scale {args.scale!r} is not one of {sorted(server.SCALE_KINDS)}")
    first = _parse_bound(store.axis, args.start)
    last = _parse_bound(store.axis, args.stop)
    if last < first:
        raise ReversedRange(f"--from {args.start} is after --to {args.stop}")

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    scale = choropleth.scale_for_track(store.summary, track, kind=kind)
    for ordinal in range(first, last + 1):
        frame = choropleth.color_frame(store.summary, store.axis.period(ordinal), track, scale)
        svg = choropleth.render_svg(frame, map_bytes)
        (outdir / f"frame-{ordinal}.svg").write_bytes(svg)
        if frame.unmatched:
            _progress(f"frame {ordinal}: no map element for {', '.join(frame.unmatched)}")
    _progress(f"wrote {last - first + 1} frames to {outdir}")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    report = load_store(args.data).file_size_report(soft_budget=args.soft_budget)
    if args.json:
        print(json.dumps(report.to_doc(), indent=2, sort_keys=True))
    else:
        print(report.text())
    return 0


def _add_budget(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--soft-budget", type=int, default=SOFT_CHUNK_BUDGET,
                        help="per-chunk soft size budget in bytes")


def build_parser() -> _Parser:
    parser = _Parser(prog="chronomap",
                     description="Temporal-spatial crisis data: ingest, store, serve, render.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="load a source file and write a chunked store")
    p.add_argument("--format", choices=("csv", "json-rows", "json-columnar", "html-table"),
                   help="override the format named in the spec")
    p.add_argument("--spec", required=True, help="ingest spec JSON file")
    p.add_argument("--in", dest="source", required=True, help="source data file")
    p.add_argument("--out", required=True, help="store output directory")
    p.add_argument("--skip-bad-rows", action="store_true",
                   help="drop rows that fail to parse instead of aborting")
    _add_budget(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("validate", help="ingest without writing and print the full report")
    p.add_argument("--format", choices=("csv", "json-rows", "json-columnar", "html-table"))
    p.add_argument("--spec", required=True)
    p.add_argument("--in", dest="source", required=True)
    p.add_argument("--skip-bad-rows", action="store_true")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("pack", help="rewrite a store in canonical form")
    p.add_argument("--data", required=True, help="existing store directory")
    p.add_argument("--out", required=True, help="destination store directory")
    _add_budget(p)
    p.set_defaults(func=_cmd_pack)

    p = sub.add_parser("serve", help="serve a store over HTTP")
    p.add_argument("--data", required=True)
    p.add_argument("--map", required=True, help="SVG map file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--cors-origin", default="*")
    _add_budget(p)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("export-frames", help="render one SVG per period to files")
    p.add_argument("--data", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--track", help="track to color by (default: first track)")
    p.add_argument("--scale", default="default", choices=sorted(server.SCALE_KINDS))
    p.add_argument("--from", dest="start", required=True, help="first ordinal or calendar label")
    p.add_argument("--to", dest="stop", required=True, help="last ordinal or calendar label")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_frames)

    p = sub.add_parser("stats", help="print store size accounting")
    p.add_argument("--data", required=True)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    _add_budget(p)
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ChronomapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1
    except Exception:
        traceback.print_exc()
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
