"""Data connectors: CSV, row JSON, columnar (dataframe-style) JSON, HTML tables.

Every connector normalises its records into the same long format --
(region, period, indicator, value) -- then densifies to the full
region x period x indicator grid with explicit MISSING gaps. Duplicate
cells are an error, never last-write-wins, and the same logical records
produce an equal :class:`~chronomap.model.Dataset` from any format.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import re
from dataclasses import dataclass
from html.parser import HTMLParser
from typing import IO, Any, Callable, Iterator, Mapping

from .errors import (
    AmbiguousName,
    ChronomapError,
    DecodeError,
    DuplicateCell,
    FormatError,
    MalformedCode,
    NoTableFound,
    PeriodError,
    RegionError,
    SchemaError,
    UnknownCode,
    Unresolvable,
    ValueParseError,
)
from .model import Cell, Dataset, Granularity, Indicator, PeriodAxis, Track, format_calendar, parse_calendar
from .regions import RegionCode, RegionRegistry, default_registry

FORMATS = ("csv", "json-rows", "json-columnar", "html-table")

_NUMBER_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_INDICATOR_RE = re.compile(r"[a-z0-9_]{1,64}")

# Raw record: (row number, region cell, period cell, indicator cell, value cell)
_Record = tuple[int, str, str, str, "str | int | float | None"]


@dataclass(frozen=True)
class IngestSpec:
    """How to read a source: format, column mapping, axis, and tracks."""

    format: str
    granularity: Granularity
    tracks: tuple[Track, ...]
    region_column: str = "region"
    period_column: str = "period"
    indicator_column: str = "indicator"
    value_column: str = "value"
    missing_token: str = ""
    skip_bad_rows: bool = False
    indicator_meta: tuple[Indicator, ...] = ()

    def __post_init__(self):
        if self.format not in FORMATS:
            raise SchemaError(f"unknown format {self.format!r}; expected one of {FORMATS}")
        if isinstance(self.granularity, str):
            object.__setattr__(self, "granularity", Granularity(self.granularity))
        tracks = tuple(t if isinstance(t, Track) else Track(*t) for t in self.tracks)
        object.__setattr__(self, "tracks", tracks)
        object.__setattr__(self, "indicator_meta", tuple(self.indicator_meta))
        columns = (self.region_column, self.period_column, self.indicator_column, self.value_column)
        if len(set(columns)) != 4:
            raise SchemaError("region/period/indicator/value columns must be distinct")
        if not self.tracks:
            raise SchemaError("at least one track is required")

    @property
    def columns(self) -> tuple[str, str, str, str]:
        return (self.region_column, self.period_column, self.indicator_column, self.value_column)

    @classmethod
    def from_json(cls, data: bytes | str) -> "IngestSpec":
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"ingest spec is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise SchemaError("ingest spec must be a JSON object")
        columns = doc.get("columns", {})
        tracks = tuple(Track(t["name"], t["indicator"]) for t in doc.get("tracks", ()))
        meta = tuple(
            Indicator(i["id"], i.get("name", ""), i.get("unit", ""))
            for i in doc.get("indicators", ())
        )
        try:
            return cls(
                format=doc.get("format", "csv"),
                granularity=Granularity(doc["granularity"]),
                tracks=tracks,
                region_column=columns.get("region", "region"),
                period_column=columns.get("period", "period"),
                indicator_column=columns.get("indicator", "indicator"),
                value_column=columns.get("value", "value"),
                missing_token=doc.get("missing_token", ""),
                skip_bad_rows=bool(doc.get("skip_bad_rows", False)),
                indicator_meta=meta,
            )
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"invalid ingest spec: {exc}") from None

    def to_json(self) -> str:
        doc = {
            "format": self.format,
            "granularity": self.granularity.value,
            "columns": {
                "region": self.region_column,
                "period": self.period_column,
                "indicator": self.indicator_column,
                "value": self.value_column,
            },
            "tracks": [{"name": t.name, "indicator": t.indicator} for t in self.tracks],
            "missing_token": self.missing_token,
            "skip_bad_rows": self.skip_bad_rows,
        }
        if self.indicator_meta:
            doc["indicators"] = [
                {"id": i.id, "name": i.name, "unit": i.unit} for i in self.indicator_meta
            ]
        return json.dumps(doc, indent=2)


@dataclass(frozen=True)
class ValidationReport:
    """Invariant violations plus coverage statistics for a dataset."""

    n_regions: int
    n_periods: int
    n_indicators: int
    n_tracks: int
    violations: tuple[str, ...]
    indicator_coverage: dict[str, float]
    period_coverage: float
    skipped_rows: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def filled_ratio(self) -> float:
        if not self.indicator_coverage:
            return 0.0
        return sum(self.indicator_coverage.values()) / len(self.indicator_coverage)

    def text(self, full: bool = False) -> str:
        lines = [
            f"dataset: {self.n_regions} regions x {self.n_periods} periods "
            f"x {self.n_indicators} indicators, {self.n_tracks} tracks",
            f"filled cells: {self.filled_ratio:.1%}",
            f"period coverage: {self.period_coverage:.1%}",
        ]
        if self.skipped_rows:
            lines.append(f"skipped rows: {self.skipped_rows}")
        if self.violations:
            lines.append(f"violations: {len(self.violations)}")
            lines.extend(f"  - {v}" for v in self.violations)
        else:
            lines.append("violations: none")
        if full:
            lines.append("indicator coverage:")
            width = max(len(i) for i in self.indicator_coverage) if self.indicator_coverage else 0
            lines.extend(
                f"  {ind:<{width}}  {ratio:>6.1%}"
                for ind, ratio in self.indicator_coverage.items()
            )
        return "\n".join(lines)


def _decode(source: bytes | str | IO[bytes]) -> str:
    if isinstance(source, str):
        return source
    if hasattr(source, "read"):
        source = source.read()
    try:
        return source.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise DecodeError(f"source is not valid UTF-8: {exc}") from None


def _parse_value(raw: str | int | float | None, missing_token: str) -> Cell:
    if raw is None:
        return None
    if isinstance(raw, bool):
        raise ValueParseError(f"{raw!r} is not numeric")
    if isinstance(raw, (int, float)):
        value = float(raw)
        if not math.isfinite(value):
            raise ValueParseError(f"{raw!r} is not finite")
        return value
    text = raw.strip()
    if text == missing_token.strip():
        return None
    if not _NUMBER_RE.fullmatch(text):
        raise ValueParseError(f"{raw!r} is not numeric (thousands separators are rejected)")
    return float(text)


# --- record extraction, one reader per format ---

def _pick(row: Mapping[str, Any], column: str, row_no: int) -> Any:
    try:
        return row[column]
    except KeyError:
        raise SchemaError(f"row {row_no}: missing mapped column {column!r}") from None


def _csv_records(text: str, spec: IngestSpec) -> Callable[[], Iterator[_Record]]:
    def factory() -> Iterator[_Record]:
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty CSV source") from None
        index: dict[str, int] = {}
        for column in spec.columns:
            if column not in header:
                raise SchemaError(f"missing mapped column {column!r} in CSV header")
            index[column] = header.index(column)
        needed = max(index.values())
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) <= needed:
                raise SchemaError(f"row {row_no}: expected at least {needed + 1} fields, got {len(row)}")
            yield (
                row_no,
                row[index[spec.region_column]],
                row[index[spec.period_column]],
                row[index[spec.indicator_column]],
                row[index[spec.value_column]],
            )
    return factory


def _rows_from_objects(rows: list[Any], spec: IngestSpec) -> Callable[[], Iterator[_Record]]:
    def factory() -> Iterator[_Record]:
        for row_no, row in enumerate(rows, start=1):
            if not isinstance(row, dict):
                raise SchemaError(f"row {row_no}: expected an object, got {type(row).__name__}")
            region = _pick(row, spec.region_column, row_no)
            period = _pick(row, spec.period_column, row_no)
            indicator = _pick(row, spec.indicator_column, row_no)
            value = _pick(row, spec.value_column, row_no)
            for label, cell in (("region", region), ("period", period), ("indicator", indicator)):
                if not isinstance(cell, str):
                    raise SchemaError(f"row {row_no}: {label} must be a string")
            if value is not None and not isinstance(value, (str, int, float)):
                raise SchemaError(f"row {row_no}: value must be a number, string, or null")
            yield row_no, region, period, indicator, value
    return factory


def _reject_constant(token: str) -> Any:
    raise DecodeError(f"non-finite JSON constant {token!r} is not allowed")


def _json_rows_records(text: str, spec: IngestSpec) -> Callable[[], Iterator[_Record]]:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise SchemaError("row JSON must be an array of objects")
    return _rows_from_objects(doc, spec)


def _json_columnar_records(text: str, spec: IngestSpec) -> Callable[[], Iterator[_Record]]:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("columnar JSON must be an object of equal-length arrays")
    columns: dict[str, list[Any]] = {}
    lengths = set()
    for column in spec.columns:
        if column not in doc:
            raise SchemaError(f"missing mapped column {column!r} in columnar JSON")
        if not isinstance(doc[column], list):
            raise SchemaError(f"column {column!r} must be an array")
        columns[column] = doc[column]
        lengths.add(len(doc[column]))
    if len(lengths) > 1:
        raise SchemaError(f"columnar arrays have unequal lengths: {sorted(lengths)}")
    rows = [
        {column: values[i] for column, values in columns.items()}
        for i in range(lengths.pop() if lengths else 0)
    ]
    return _rows_from_objects(rows, spec)


class _FirstTableParser(HTMLParser):
    """Collects the cell text of the first top-level <table> in a document."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.rows: list[list[str]] = []
        self._depth = 0
        self._done = False
        self._row: list[str] | None = None
        self._cell: list[str] | None = None

    def handle_starttag(self, tag, attrs):
        if self._done:
            return
        if tag == "table":
            self._depth += 1
        elif self._depth == 1:
            if tag == "tr":
                self._flush_row()
                self._row = []
            elif tag in ("td", "th"):
                self._flush_cell()
                if self._row is not None:
                    self._cell = []

    def handle_endtag(self, tag):
        if self._done:
            return
        if tag == "table" and self._depth:
            self._depth -= 1
            if self._depth == 0:
                self._flush_row()
                self._done = True
        elif self._depth == 1:
            if tag == "tr":
                self._flush_row()
            elif tag in ("td", "th"):
                self._flush_cell()

    def handle_data(self, data):
        if self._depth == 1 and self._cell is not None:
            self._cell.append(data)

    def _flush_cell(self):
        if self._cell is not None and self._row is not None:
            self._row.append("".join(self._cell).strip())
            self._cell = None

    def _flush_row(self):
        self._flush_cell()
        if self._row is not None:
            self.rows.append(self._row)
            self._row = None


def _html_table_records(text: str, spec: IngestSpec) -> Callable[[], Iterator[_Record]]:
    parser = _FirstTableParser()
    parser.feed(text)
    parser.close()
    rows = [row for row in parser.rows if row]
    if not parser._done and not rows:
        raise NoTableFound("document contains no <table>")
    if not rows:
        raise SchemaError("first table has no rows")
    header, data = rows[0], rows[1:]
    index: dict[str, int] = {}
    for column in spec.columns:
        if column not in header:
            raise SchemaError(f"missing mapped column {column!r} in table header")
        index[column] = header.index(column)
    needed = max(index.values())

    def factory() -> Iterator[_Record]:
        for row_no, row in enumerate(data, start=2):
            if len(row) <= needed:
                raise SchemaError(f"row {row_no}: expected at least {needed + 1} cells, got {len(row)}")
            yield (
                row_no,
                row[index[spec.region_column]],
                row[index[spec.period_column]],
                row[index[spec.indicator_column]],
                row[index[spec.value_column]],
            )
    return factory


_READERS = {
    "csv": _csv_records,
    "json-rows": _json_rows_records,
    "json-columnar": _json_columnar_records,
    "html-table": _html_table_records,
}


@dataclass(frozen=True)
class IngestResult:
    dataset: Dataset
    skipped_rows: int


class _Unset:
    __slots__ = ()

    def __repr__(self):  # pragma: no cover
        return "<unset>"


_UNSET = _Unset()


def load(source: bytes | str | IO[bytes], spec: IngestSpec,
         registry: RegionRegistry | None = None) -> IngestResult:
    """Run a connector and keep the skipped-row count alongside the dataset."""
    registry = registry or default_registry()
    text = _decode(source)
    factory = _READERS[spec.format](text, spec)

    region_cache: dict[str, RegionCode] = {}
    period_cache: dict[str, int] = {}
    indicator_ok: set[str] = set()
    bad_rows: set[int] = set()
    lo = hi = None
    n_rows = 0

    def resolve_row(row: _Record, first_pass: bool) -> tuple[str, int, str] | None:
        row_no, region_raw, period_raw, indicator_raw, value_raw = row
        try:
            region = region_cache.get(region_raw)
            if region is None:
                region = registry.resolve(region_raw)
                region_cache[region_raw] = region
            base = period_cache.get(period_raw)
            if base is None:
                base = parse_calendar(period_raw.strip(), spec.granularity)
                period_cache[period_raw] = base
            indicator = indicator_raw.strip()
            if indicator not in indicator_ok:
                if not _INDICATOR_RE.fullmatch(indicator):
                    raise SchemaError(f"indicator id {indicator_raw!r} must match [a-z0-9_]{{1,64}}")
                indicator_ok.add(indicator)
            if first_pass and spec.skip_bad_rows:
                _parse_value(value_raw, spec.missing_token)
        except ChronomapError as exc:
            if spec.skip_bad_rows:
                bad_rows.add(row_no)
                return None
            if isinstance(exc, (Unresolvable, AmbiguousName, MalformedCode, UnknownCode)):
                raise RegionError(f"row {row_no}: {exc}") from None
            if isinstance(exc, FormatError):
                raise PeriodError(f"row {row_no}: {exc}") from None
            raise type(exc)(f"row {row_no}: {exc}") from None
        return region.text, base, indicator

    for row in factory():
        resolved = resolve_row(row, first_pass=True)
        if resolved is None:
            continue
        _, base, _ = resolved
        lo = base if lo is None else min(lo, base)
        hi = base if hi is None else max(hi, base)
        n_rows += 1

    if n_rows == 0:
        raise SchemaError("source contains no usable records")

    axis = PeriodAxis(spec.granularity, format_calendar(lo, spec.granularity), hi - lo + 1)
    region_by_text = {code.text: code for code in region_cache.values()}
    regions = tuple(region_by_text[t] for t in sorted(region_by_text))
    meta_by_id = {i.id: i for i in spec.indicator_meta}
    indicators = tuple(meta_by_id.get(i, Indicator(i)) for i in sorted(indicator_ok))

    grid: dict[str, dict[str, list[Any]]] = {
        r.text: {i.id: [_UNSET] * axis.count for i in indicators} for r in regions
    }
    for row in factory():
        if row[0] in bad_rows:
            continue
        resolved = resolve_row(row, first_pass=False)
        if resolved is None:
            continue
        region_text, base, indicator = resolved
        row_no, _, _, _, value_raw = row
        try:
            value = _parse_value(value_raw, spec.missing_token)
        except ValueParseError as exc:
            raise ValueParseError(f"row {row_no}: {exc}") from None
        series = grid[region_text][indicator]
        ordinal = base - lo
        if series[ordinal] is not _UNSET:
            raise DuplicateCell(
                f"row {row_no}: duplicate cell ({region_text}, {axis.label(ordinal)}, {indicator})")
        series[ordinal] = value

    cells = {
        region: {
            indicator: tuple(None if v is _UNSET else v for v in series)
            for indicator, series in by_indicator.items()
        }
        for region, by_indicator in grid.items()
    }
    skipped = len(bad_rows)
    provenance = f"{spec.format} ingest"
    if skipped:
        provenance += f" ({skipped} rows skipped)"
    dataset = Dataset(
        axis=axis,
        regions=regions,
        indicators=indicators,
        tracks=spec.tracks,
        cells=cells,
        provenance=provenance,
    )
    return IngestResult(dataset, skipped)


def ingest(source: bytes | str | IO[bytes], spec: IngestSpec,
           registry: RegionRegistry | None = None) -> Dataset:
    """Load a source into a validated, densified dataset."""
    return load(source, spec, registry).dataset


def ingest_html_table(document: bytes | str | IO[bytes], spec: IngestSpec,
                      registry: RegionRegistry | None = None) -> Dataset:
    """Parse the first <table> of an HTML document, then ingest it."""
    if spec.format != "html-table":
        spec = dataclasses.replace(spec, format="html-table")
    return ingest(document, spec, registry)


def validate(dataset: Dataset, skipped_rows: int = 0) -> ValidationReport:
    """Full-scan invariant check plus coverage statistics. Never raises."""
    violations: list[str] = []
    declared_regions = set(dataset.region_texts)
    declared_indicators = set(dataset.indicator_ids)
    count = dataset.axis.count

    non_missing: dict[str, int] = {i: 0 for i in dataset.indicator_ids}
    period_hit = [False] * count

    for region, by_indicator in dataset.cells.items():
        if region not in declared_regions:
            violations.append(f"undeclared region {region!r} in cells")
        for indicator, series in by_indicator.items():
            if indicator not in declared_indicators:
                violations.append(f"undeclared indicator {indicator!r} under region {region!r}")
                continue
            if len(series) != count:
                violations.append(
                    f"series ({region}, {indicator}) has length {len(series)}, expected {count}")
            hits = 0
            for ordinal, value in enumerate(series):
                if value is None:
                    continue
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    violations.append(
                        f"cell ({region}, {ordinal}, {indicator}) is not a number: {value!r}")
                    continue
                if not math.isfinite(value):
                    violations.append(f"cell ({region}, {ordinal}, {indicator}) is not finite")
                    continue
                hits += 1
                if ordinal < count:
                    period_hit[ordinal] = True
            non_missing[indicator] = non_missing.get(indicator, 0) + hits

    for region in dataset.region_texts:
        by_indicator = dataset.cells.get(region)
        if by_indicator is None:
            violations.append(f"region {region!r} has no series at all")
            continue
        for indicator in dataset.indicator_ids:
            if indicator not in by_indicator:
                violations.append(f"series ({region}, {indicator}) is missing")

    cells_per_indicator = len(dataset.regions) * count
    coverage = {
        i: (non_missing.get(i, 0) / cells_per_indicator if cells_per_indicator else 0.0)
        for i in dataset.indicator_ids
    }
    return ValidationReport(
        n_regions=len(dataset.regions),
        n_periods=count,
        n_indicators=len(dataset.indicators),
        n_tracks=len(dataset.tracks),
        violations=tuple(violations),
        indicator_coverage=coverage,
        period_coverage=sum(period_hit) / count if count else 0.0,
        skipped_rows=skipped_rows,
    )
