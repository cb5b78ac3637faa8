"""Core domain types: the period axis, indicators, tracks and the dataset.

A :class:`Dataset` is an immutable, fully densified grid of
``(region, period, indicator) -> value`` cells. Gaps are explicit: a cell
is either a finite 64-bit float or ``MISSING`` (``None``), never silently
absent. Integers survive exactly up to 2**53.
"""

from __future__ import annotations

import datetime as _dt
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping

from .errors import FormatError, ReversedRange, TrackSourceMissing
from .regions import RegionCode

# Explicit gap marker, deliberately distinct from 0.0.
MISSING = None

Cell = float | None

_MONTH_RE = re.compile(r"(\d{4})-(\d{2})")
_DAY_RE = re.compile(r"(\d{4})-(\d{2})-(\d{2})")


class Granularity(str, Enum):
    MONTHLY = "monthly"
    DAILY = "daily"


def _month_base(label: str) -> int:
    m = _MONTH_RE.fullmatch(label)
    if not m:
        raise FormatError(f"{label!r} is not a YYYY-MM month")
    year, month = int(m.group(1)), int(m.group(2))
    if not 1 <= month <= 12:
        raise FormatError(f"{label!r} has month outside 01..12")
    return year * 12 + (month - 1)


def _day_base(label: str) -> int:
    if not _DAY_RE.fullmatch(label):
        raise FormatError(f"{label!r} is not a YYYY-MM-DD day")
    try:
        return _dt.date.fromisoformat(label).toordinal()
    except ValueError as exc:
        raise FormatError(f"{label!r}: {exc}") from None


def parse_calendar(label: str, granularity: Granularity) -> int:
    """Calendar form -> absolute position (months or days since a fixed epoch)."""
    if granularity is Granularity.MONTHLY:
        return _month_base(label)
    return _day_base(label)


def format_calendar(base: int, granularity: Granularity) -> str:
    if granularity is Granularity.MONTHLY:
        year, month = divmod(base, 12)
        return f"{year:04d}-{month + 1:02d}"
    return _dt.date.fromordinal(base).isoformat()


@dataclass(frozen=True)
class Period:
    """One step of a dataset's time axis."""

    granularity: Granularity
    ordinal: int
    label: str


@dataclass(frozen=True)
class PeriodAxis:
    """Dense, contiguous period range; ordinal 0 is the earliest period."""

    granularity: Granularity
    first: str
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise FormatError("axis needs at least one period")
        parse_calendar(self.first, self.granularity)  # validates the label

    @property
    def _base(self) -> int:
        return parse_calendar(self.first, self.granularity)

    @property
    def last(self) -> str:
        return self.label(self.count - 1)

    def label(self, ordinal: int) -> str:
        if not 0 <= ordinal < self.count:
            raise IndexError(f"ordinal {ordinal} outside 0..{self.count - 1}")
        return format_calendar(self._base + ordinal, self.granularity)

    def ordinal(self, label: str) -> int:
        ordinal = parse_calendar(label, self.granularity) - self._base
        if not 0 <= ordinal < self.count:
            raise IndexError(f"{label} outside {self.first}..{self.last}")
        return ordinal

    def period(self, ordinal: int) -> Period:
        return Period(self.granularity, ordinal, self.label(ordinal))

    def periods(self) -> tuple[Period, ...]:
        return tuple(self.period(i) for i in range(self.count))

    @classmethod
    def from_bounds(cls, first: str, last: str, granularity: Granularity) -> "PeriodAxis":
        lo = parse_calendar(first, granularity)
        hi = parse_calendar(last, granularity)
        if hi < lo:
            raise ReversedRange(f"{first} is after {last}")
        return cls(granularity, format_calendar(lo, granularity), hi - lo + 1)


def period_range(first: str, last: str, granularity: Granularity) -> tuple[Period, ...]:
    """Dense ascending periods from ``first`` to ``last``, ordinals 0..n-1."""
    return PeriodAxis.from_bounds(first, last, granularity).periods()


_INDICATOR_ID_RE = re.compile(r"[a-z0-9_]{1,64}")


@dataclass(frozen=True)
class Indicator:
    """A named per-region time series variable."""

    id: str
    name: str = ""
    unit: str = ""

    def __post_init__(self):
        if not _INDICATOR_ID_RE.fullmatch(self.id):
            raise ValueError(f"indicator id {self.id!r} must match [a-z0-9_]{{1,64}}")
        if not self.name:
            object.__setattr__(self, "name", self.id)


@dataclass(frozen=True)
class Track:
    """A value series promoted to the timeline and map (e.g. prediction)."""

    name: str
    indicator: str


@dataclass(frozen=True)
class Dataset:
    """Immutable (region, period, indicator) -> value store.

    ``cells`` maps canonical region text -> indicator id -> a per-ordinal
    tuple of length ``axis.count``. Regions and indicators are kept in
    sorted order so that logically equal inputs build equal datasets
    regardless of record order. ``provenance`` is a free-text source note
    and does not participate in equality.
    """

    axis: PeriodAxis
    regions: tuple[RegionCode, ...]
    indicators: tuple[Indicator, ...]
    tracks: tuple[Track, ...]
    cells: Mapping[str, Mapping[str, tuple[Cell, ...]]]
    provenance: str = field(default="", compare=False)

    def __post_init__(self):
        texts = [r.text for r in self.regions]
        if len(set(texts)) != len(texts):
            raise ValueError("duplicate regions")
        ids = [i.id for i in self.indicators]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate indicator ids")
        if not self.tracks:
            raise ValueError("a dataset needs at least one track")
        declared = set(ids)
        for track in self.tracks:
            if track.indicator not in declared:
                raise TrackSourceMissing(
                    f"track {track.name!r} references undeclared indicator {track.indicator!r}")
        names = [t.name for t in self.tracks]
        if len(set(names)) != len(names):
            raise ValueError("duplicate track names")

    # The cells mapping itself is validated by ingest/validate, not here,
    # so that validate() can report on hand-built inconsistent datasets.

    @property
    def region_texts(self) -> tuple[str, ...]:
        return tuple(r.text for r in self.regions)

    @property
    def indicator_ids(self) -> tuple[str, ...]:
        return tuple(i.id for i in self.indicators)

    @property
    def n_values(self) -> int:
        return len(self.regions) * self.axis.count * len(self.indicators)

    def value(self, region: str | RegionCode, ordinal: int, indicator: str) -> Cell:
        key = region.text if isinstance(region, RegionCode) else region
        return self.cells[key][indicator][ordinal]

    def series(self, region: str | RegionCode, indicator: str) -> tuple[Cell, ...]:
        key = region.text if isinstance(region, RegionCode) else region
        return self.cells[key][indicator]

    def iter_values(self) -> Iterator[tuple[str, int, str, Cell]]:
        """Full scan as (region text, ordinal, indicator id, value)."""
        for region, by_indicator in self.cells.items():
            for indicator, series in by_indicator.items():
                for ordinal, value in enumerate(series):
                    yield region, ordinal, indicator, value
