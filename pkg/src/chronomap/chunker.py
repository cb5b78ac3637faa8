"""Split a dataset into the eager global summary and lazy per-region chunks.

The summary carries every region's track values for all periods and is
meant to be loaded at startup; detail chunks carry one region's full
indicator matrix and are fetched on demand. Chunks are persisted one file
per country, with ISO-3166-2 subdivision members stored inside their
country's file.

Serialisation is a canonical JSON profile: sorted object keys, no
insignificant whitespace, ``null`` for MISSING, and numbers rendered
shortest-round-trip (integral values without a decimal point). Equal
logical content therefore yields byte-identical payloads, and the SHA-256
of those bytes doubles as the HTTP ETag.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import CorruptPayload, StoreError, TrackSourceMissing
from .model import Cell, Dataset, Granularity, Indicator, PeriodAxis, Track
from .regions import RegionCode

SOFT_CHUNK_BUDGET = 256 * 1024

_MAX_EXACT_INT = 2 ** 53

META_FILE = "meta.json"
SUMMARY_FILE = "summary.json"
CHUNK_DIR = "chunks"


def _canon_number(value: Cell) -> Any:
    if value is None:
        return None
    if isinstance(value, float) and value.is_integer() and abs(value) <= _MAX_EXACT_INT:
        return int(value)
    return value


def _canon_doc(doc: Any) -> Any:
    if isinstance(doc, Mapping):
        return {key: _canon_doc(value) for key, value in doc.items()}
    if isinstance(doc, (list, tuple)):
        return [_canon_doc(value) for value in doc]
    return _canon_number(doc)


def canonical_json(doc: Any) -> bytes:
    """Deterministic JSON bytes: sorted keys, compact, UTF-8, no NaN.

    Integral floats up to 2**53 are rendered as integers, so equal logical
    content always maps to identical bytes (and one content hash).
    """
    return json.dumps(
        _canon_doc(doc), sort_keys=True, separators=(",", ":"),
        ensure_ascii=False, allow_nan=False,
    ).encode("utf-8")


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _cell_from_json(value: Any) -> Cell:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CorruptPayload(f"cell {value!r} is not a number or null")
    value = float(value)
    if not math.isfinite(value):
        raise CorruptPayload(f"cell {value!r} is not finite")
    return value


@dataclass(frozen=True)
class GlobalSummary:
    """Per region x period, one value per named track; the eager payload."""

    regions: tuple[str, ...]
    n_periods: int
    tracks: dict[str, tuple[tuple[Cell, ...], ...]]

    @property
    def track_names(self) -> tuple[str, ...]:
        return tuple(self.tracks)

    @property
    def n_cells(self) -> int:
        return len(self.tracks) * len(self.regions) * self.n_periods

    def value(self, track: str, region: str, ordinal: int) -> Cell:
        return self.tracks[track][self.regions.index(region)][ordinal]

    def to_doc(self) -> dict[str, Any]:
        return {
            "kind": "summary",
            "n_periods": self.n_periods,
            "regions": list(self.regions),
            "tracks": [
                {"name": name, "values": [list(row) for row in matrix]}
                for name, matrix in self.tracks.items()
            ],
        }

    @cached_property
    def content_hash(self) -> str:
        return content_hash(serialize(self))


@dataclass(frozen=True)
class DetailChunk:
    """One region's full indicator x period matrix; the lazy payload."""

    region: RegionCode
    series: dict[str, tuple[Cell, ...]]

    @property
    def n_cells(self) -> int:
        return sum(len(s) for s in self.series.values())

    def to_doc(self) -> dict[str, Any]:
        return {"kind": "chunk", **self._member_doc()}

    def _member_doc(self) -> dict[str, Any]:
        return {
            "region": self.region.text,
            "series": {ind: list(s) for ind, s in self.series.items()},
        }

    @cached_property
    def content_hash(self) -> str:
        return content_hash(serialize(self))


@dataclass(frozen=True)
class DetailBundle:
    """A country's chunk together with its subdivision chunks, as persisted."""

    country: str
    members: tuple[DetailChunk, ...]

    def member(self, region_text: str) -> DetailChunk | None:
        for chunk in self.members:
            if chunk.region.text == region_text:
                return chunk
        return None

    def to_doc(self) -> dict[str, Any]:
        return {
            "kind": "detail",
            "country": self.country,
            "members": [m._member_doc() for m in self.members],
        }

    @cached_property
    def content_hash(self) -> str:
        return content_hash(serialize(self))


def build_summary(dataset: Dataset) -> GlobalSummary:
    """Copy each track's source-indicator series into a region x period matrix."""
    declared = set(dataset.indicator_ids)
    for track in dataset.tracks:
        if track.indicator not in declared:
            raise TrackSourceMissing(
                f"track {track.name!r} sources undeclared indicator {track.indicator!r}")
    tracks = {
        track.name: tuple(dataset.cells[region][track.indicator] for region in dataset.region_texts)
        for track in dataset.tracks
    }
    return GlobalSummary(regions=dataset.region_texts, n_periods=dataset.axis.count, tracks=tracks)


def build_chunks(dataset: Dataset) -> list[DetailChunk]:
    """Exactly one chunk per region; together they reproduce the dataset."""
    return [
        DetailChunk(
            region=region,
            series={ind: dataset.cells[region.text][ind] for ind in dataset.indicator_ids},
        )
        for region in dataset.regions
    ]


def bundle_chunks(chunks: Iterable[DetailChunk]) -> dict[str, DetailBundle]:
    """Group chunks into per-country bundles, subdivisions with their country."""
    by_country: dict[str, list[DetailChunk]] = {}
    for chunk in chunks:
        by_country.setdefault(chunk.region.country, []).append(chunk)
    return {
        country: DetailBundle(country, tuple(sorted(members, key=lambda c: c.region.text)))
        for country, members in sorted(by_country.items())
    }


Payload = GlobalSummary | DetailChunk | DetailBundle


def serialize(payload: Payload) -> bytes:
    """Canonical, deterministic bytes for a summary, chunk, or bundle."""
    return canonical_json(payload.to_doc())


def _require(doc: Mapping[str, Any], key: str, kind: type | tuple[type, ...]) -> Any:
    if key not in doc:
        raise CorruptPayload(f"payload is missing {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise CorruptPayload(f"payload field {key!r} has unexpected type {type(value).__name__}")
    return value


def _summary_from_doc(doc: Mapping[str, Any]) -> GlobalSummary:
    regions = tuple(_require(doc, "regions", list))
    if not all(isinstance(r, str) for r in regions):
        raise CorruptPayload("summary regions must be strings")
    n_periods = _require(doc, "n_periods", int)
    tracks: dict[str, tuple[tuple[Cell, ...], ...]] = {}
    for entry in _require(doc, "tracks", list):
        if not isinstance(entry, dict):
            raise CorruptPayload("summary track entries must be objects")
        name = _require(entry, "name", str)
        rows = _require(entry, "values", list)
        if len(rows) != len(regions):
            raise CorruptPayload(f"track {name!r} has {len(rows)} rows for {len(regions)} regions")
        matrix = []
        for row in rows:
            if not isinstance(row, list) or len(row) != n_periods:
                raise CorruptPayload(f"track {name!r} has a row of the wrong length")
            matrix.append(tuple(_cell_from_json(v) for v in row))
        if name in tracks:
            raise CorruptPayload(f"duplicate track {name!r}")
        tracks[name] = tuple(matrix)
    return GlobalSummary(regions=regions, n_periods=n_periods, tracks=tracks)


def _member_from_doc(doc: Mapping[str, Any]) -> DetailChunk:
    try:
        region = RegionCode.from_text(_require(doc, "region", str))
    except Exception as exc:
        raise CorruptPayload(f"bad chunk region: {exc}") from None
    series_doc = _require(doc, "series", dict)
    lengths = set()
    series: dict[str, tuple[Cell, ...]] = {}
    for indicator, values in series_doc.items():
        if not isinstance(values, list):
            raise CorruptPayload(f"series {indicator!r} must be an array")
        series[indicator] = tuple(_cell_from_json(v) for v in values)
        lengths.add(len(values))
    if len(lengths) > 1:
        raise CorruptPayload(f"chunk {region.text} has ragged series lengths {sorted(lengths)}")
    return DetailChunk(region=region, series=series)


def _bundle_from_doc(doc: Mapping[str, Any]) -> DetailBundle:
    country = _require(doc, "country", str)
    members = tuple(_member_from_doc(m) for m in _require(doc, "members", list))
    for member in members:
        if member.region.country != country:
            raise CorruptPayload(
                f"bundle {country} contains foreign member {member.region.text}")
    return DetailBundle(country=country, members=members)


def _reject_constant(token: str) -> float:
    raise CorruptPayload(f"payload contains non-finite number {token}")


def deserialize(data: bytes) -> Payload:
    """Inverse of :func:`serialize`; detects the payload kind."""
    try:
        doc = json.loads(data, parse_constant=_reject_constant)
    except CorruptPayload:
        raise
    except (json.JSONDecodeError, UnicodeDecodeError, ValueError) as exc:
        raise CorruptPayload(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise CorruptPayload("payload must be a JSON object")
    kind = doc.get("kind")
    if kind == "summary":
        return _summary_from_doc(doc)
    if kind == "chunk":
        return _member_from_doc(doc)
    if kind == "detail":
        return _bundle_from_doc(doc)
    raise CorruptPayload(f"unknown payload kind {kind!r}")


@dataclass(frozen=True)
class SizeReport:
    """Serialized size accounting for a dataset's store."""

    summary_bytes: int
    meta_bytes: int
    chunk_bytes: dict[str, int]
    soft_budget: int

    @property
    def n_chunks(self) -> int:
        return len(self.chunk_bytes)

    @property
    def min_chunk_bytes(self) -> int:
        return min(self.chunk_bytes.values()) if self.chunk_bytes else 0

    @property
    def max_chunk_bytes(self) -> int:
        return max(self.chunk_bytes.values()) if self.chunk_bytes else 0

    @property
    def mean_chunk_bytes(self) -> float:
        if not self.chunk_bytes:
            return 0.0
        return sum(self.chunk_bytes.values()) / len(self.chunk_bytes)

    @property
    def total_bytes(self) -> int:
        return self.summary_bytes + self.meta_bytes + sum(self.chunk_bytes.values())

    @property
    def warnings(self) -> tuple[str, ...]:
        return tuple(
            f"chunk {country}: {size} bytes exceeds soft budget of {self.soft_budget} bytes"
            for country, size in sorted(self.chunk_bytes.items())
            if size > self.soft_budget
        )

    def to_doc(self) -> dict[str, Any]:
        return {
            "summary_bytes": self.summary_bytes,
            "meta_bytes": self.meta_bytes,
            "n_chunks": self.n_chunks,
            "min_chunk_bytes": self.min_chunk_bytes,
            "mean_chunk_bytes": self.mean_chunk_bytes,
            "max_chunk_bytes": self.max_chunk_bytes,
            "total_bytes": self.total_bytes,
            "soft_budget_bytes": self.soft_budget,
            "warnings": list(self.warnings),
            "chunk_bytes": dict(sorted(self.chunk_bytes.items())),
        }

    def text(self) -> str:
        rows = [
            ("summary", f"{self.summary_bytes:,} B"),
            ("meta", f"{self.meta_bytes:,} B"),
            ("chunks", f"{self.n_chunks}"),
            ("chunk min", f"{self.min_chunk_bytes:,} B"),
            ("chunk mean", f"{self.mean_chunk_bytes:,.0f} B"),
            ("chunk max", f"{self.max_chunk_bytes:,} B"),
            ("total", f"{self.total_bytes:,} B"),
        ]
        width = max(len(label) for label, _ in rows)
        lines = [f"{label:<{width}}  {value:>14}" for label, value in rows]
        lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines)


def _meta_doc(dataset: Dataset, summary_hash: str, chunk_hashes: dict[str, str]) -> dict[str, Any]:
    axis = dataset.axis
    return {
        "kind": "meta",
        "granularity": axis.granularity.value,
        "periods": {"first": axis.first, "last": axis.last, "count": axis.count},
        "regions": list(dataset.region_texts),
        "indicators": [
            {"id": i.id, "name": i.name, "unit": i.unit} for i in dataset.indicators
        ],
        "tracks": [{"name": t.name, "indicator": t.indicator} for t in dataset.tracks],
        "provenance": dataset.provenance,
        "hashes": {"summary": summary_hash, "chunks": chunk_hashes},
    }


def _build_store_payloads(dataset: Dataset) -> tuple[bytes, dict[str, bytes], bytes]:
    """(summary bytes, per-country bundle bytes, meta bytes)."""
    summary = build_summary(dataset)
    summary_bytes = serialize(summary)
    bundles = bundle_chunks(build_chunks(dataset))
    bundle_bytes = {country: serialize(b) for country, b in bundles.items()}
    meta = _meta_doc(
        dataset,
        summary_hash=content_hash(summary_bytes),
        chunk_hashes={c: content_hash(b) for c, b in bundle_bytes.items()},
    )
    return summary_bytes, bundle_bytes, canonical_json(meta)


def size_report(dataset: Dataset, soft_budget: int = SOFT_CHUNK_BUDGET) -> SizeReport:
    """Serialized byte sizes of the summary and every chunk file."""
    summary_bytes, bundle_bytes, meta_bytes = _build_store_payloads(dataset)
    return SizeReport(
        summary_bytes=len(summary_bytes),
        meta_bytes=len(meta_bytes),
        chunk_bytes={c: len(b) for c, b in bundle_bytes.items()},
        soft_budget=soft_budget,
    )


@dataclass(frozen=True)
class WriteResult:
    root: Path
    meta_path: Path
    summary_path: Path
    chunk_paths: dict[str, Path]
    report: SizeReport


def write_store(dataset: Dataset, outdir: str | Path,
                soft_budget: int = SOFT_CHUNK_BUDGET) -> WriteResult:
    """Persist ``meta.json``, ``summary.json`` and ``chunks/<REGION>.json``."""
    root = Path(outdir)
    (root / CHUNK_DIR).mkdir(parents=True, exist_ok=True)
    summary_bytes, bundle_bytes, meta_bytes = _build_store_payloads(dataset)

    summary_path = root / SUMMARY_FILE
    summary_path.write_bytes(summary_bytes)
    meta_path = root / META_FILE
    meta_path.write_bytes(meta_bytes)
    chunk_paths: dict[str, Path] = {}
    for country, data in bundle_bytes.items():
        path = root / CHUNK_DIR / f"{country}.json"
        path.write_bytes(data)
        chunk_paths[country] = path
    report = SizeReport(
        summary_bytes=len(summary_bytes),
        meta_bytes=len(meta_bytes),
        chunk_bytes={c: len(b) for c, b in bundle_bytes.items()},
        soft_budget=soft_budget,
    )
    return WriteResult(root, meta_path, summary_path, chunk_paths, report)


class Store:
    """Read view over a persisted store directory.

    The meta document and summary are loaded eagerly and verified against
    their recorded hashes; chunk bundles are read from disk on demand.
    Instances are immutable after construction and safe to share across
    threads.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        try:
            self.meta_bytes = (self.root / META_FILE).read_bytes()
        except OSError as exc:
            raise StoreError(f"cannot read {META_FILE}: {exc}") from None
        try:
            meta = json.loads(self.meta_bytes)
        except json.JSONDecodeError as exc:
            raise StoreError(f"{META_FILE} is not valid JSON: {exc}") from None
        if not isinstance(meta, dict) or meta.get("kind") != "meta":
            raise StoreError(f"{META_FILE} is not a store meta document")
        try:
            self.granularity = Granularity(meta["granularity"])
            periods = meta["periods"]
            self.axis = PeriodAxis(self.granularity, periods["first"], periods["count"])
            if self.axis.last != periods["last"]:
                raise StoreError(
                    f"period range is inconsistent: {periods['last']} vs {self.axis.last}")
            self.regions = tuple(meta["regions"])
            self.indicators = tuple(
                Indicator(i["id"], i.get("name", ""), i.get("unit", ""))
                for i in meta["indicators"]
            )
            self.tracks = tuple(Track(t["name"], t["indicator"]) for t in meta["tracks"])
            self.provenance = meta.get("provenance", "")
            hashes = meta["hashes"]
            self.summary_hash: str = hashes["summary"]
            self.chunk_hashes: dict[str, str] = dict(hashes["chunks"])
        except StoreError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise StoreError(f"{META_FILE} is malformed: {exc!r}") from None
        self.meta_hash = content_hash(self.meta_bytes)

        try:
            self.summary_bytes = (self.root / SUMMARY_FILE).read_bytes()
        except OSError as exc:
            raise StoreError(f"cannot read {SUMMARY_FILE}: {exc}") from None
        if content_hash(self.summary_bytes) != self.summary_hash:
            raise StoreError(f"{SUMMARY_FILE} does not match its recorded hash")
        payload = deserialize(self.summary_bytes)
        if not isinstance(payload, GlobalSummary):
            raise StoreError(f"{SUMMARY_FILE} does not hold a summary payload")
        self.summary: GlobalSummary = payload
        if self.summary.regions != self.regions or self.summary.n_periods != self.axis.count:
            raise StoreError(f"{SUMMARY_FILE} disagrees with {META_FILE} about the grid")

    @property
    def track_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.tracks)

    def chunk_countries(self) -> tuple[str, ...]:
        return tuple(sorted(self.chunk_hashes))

    def chunk_path(self, country: str) -> Path:
        return self.root / CHUNK_DIR / f"{country}.json"

    def chunk_bytes(self, country: str) -> bytes:
        expected = self.chunk_hashes.get(country)
        if expected is None:
            raise KeyError(country)
        try:
            data = self.chunk_path(country).read_bytes()
        except OSError as exc:
            raise StoreError(f"cannot read chunk {country}: {exc}") from None
        if content_hash(data) != expected:
            raise StoreError(f"chunk {country} does not match its recorded hash")
        return data

    def bundle(self, country: str) -> DetailBundle:
        payload = deserialize(self.chunk_bytes(country))
        if not isinstance(payload, DetailBundle):
            raise StoreError(f"chunk {country} does not hold a detail bundle")
        return payload

    def reassemble(self) -> Dataset:
        """Rebuild the full dataset from the summary's sibling chunk files."""
        cells: dict[str, dict[str, tuple[Cell, ...]]] = {}
        regions: dict[str, RegionCode] = {}
        for country in self.chunk_countries():
            for member in self.bundle(country).members:
                if member.region.text in cells:
                    raise StoreError(f"region {member.region.text} appears in two bundles")
                regions[member.region.text] = member.region
                cells[member.region.text] = dict(member.series)
        missing = [r for r in self.regions if r not in cells]
        if missing:
            raise StoreError(f"store is missing chunks for regions: {', '.join(missing)}")
        return Dataset(
            axis=self.axis,
            regions=tuple(regions[t] for t in self.regions),
            indicators=self.indicators,
            tracks=self.tracks,
            cells={t: cells[t] for t in self.regions},
            provenance=self.provenance,
        )

    def file_size_report(self, soft_budget: int = SOFT_CHUNK_BUDGET) -> SizeReport:
        """Size accounting from the files on disk (equals a fresh size_report)."""
        try:
            return SizeReport(
                summary_bytes=(self.root / SUMMARY_FILE).stat().st_size,
                meta_bytes=(self.root / META_FILE).stat().st_size,
                chunk_bytes={
                    c: self.chunk_path(c).stat().st_size for c in self.chunk_countries()
                },
                soft_budget=soft_budget,
            )
        except OSError as exc:
            raise StoreError(f"store file disappeared: {exc}") from None


def load_store(data_dir: str | Path) -> Store:
    return Store(data_dir)
