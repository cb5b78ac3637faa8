"""Exception hierarchy shared across the package.

Every error carries a short stable ``code`` (its class name) which doubles
as the machine-readable error code in HTTP responses and CLI messages.
"""

from __future__ import annotations


class ChronomapError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- region registry ---

class MalformedCode(ChronomapError):
    """Text does not match the CC or CC-SUB code shape."""


class UnknownCode(ChronomapError):
    """Well-formed code that is not present in the registry."""


class Unresolvable(ChronomapError):
    """Name that matches no code, official name, or alias."""


class AmbiguousName(ChronomapError):
    """Name that matches several regions; candidates are listed."""

    def __init__(self, text: str, candidates: list[str]):
        super().__init__(f"{text!r} is ambiguous; candidates: {', '.join(candidates)}")
        self.candidates = tuple(candidates)


class RegistryError(ChronomapError):
    """Malformed registry data file."""


# --- time axis ---

class FormatError(ChronomapError):
    """Calendar form does not match the granularity's format."""


class ReversedRange(ChronomapError):
    """Range where the first period is after the last."""


# --- ingest ---

class DecodeError(ChronomapError):
    """Source bytes are not valid UTF-8 or not the expected document shape."""


class SchemaError(ChronomapError):
    """A mapped column is missing or a record is structurally wrong."""


class DuplicateCell(ChronomapError):
    """Same (region, period, indicator) appears more than once."""


class RegionError(ChronomapError):
    """Row whose region cell cannot be resolved."""


class PeriodError(ChronomapError):
    """Row whose period cell cannot be parsed."""


class ValueParseError(ChronomapError):
    """Row whose value cell is neither numeric nor the missing token."""


class NoTableFound(ChronomapError):
    """HTML document without a <table> element."""


class TrackSourceMissing(ChronomapError):
    """Track referencing an indicator the dataset does not declare."""


# --- chunk store ---

class CorruptPayload(ChronomapError):
    """Bytes that do not deserialize to a known payload."""


class StoreError(ChronomapError):
    """Chunk store directory that is missing files or inconsistent."""


# --- choropleth ---

class DegenerateScale(ChronomapError):
    """Linear scale whose domain has zero width."""


class UnknownTrack(ChronomapError):
    """Track name not present in the summary."""


class UnknownScale(ChronomapError):
    """Scale name not present in the server configuration."""


class PeriodOutOfRange(ChronomapError):
    """Period ordinal outside the dataset's range."""


class MalformedSvg(ChronomapError):
    """Map document that does not parse as XML."""


# --- server ---

class UnknownRegion(ChronomapError):
    """Region that has no detail chunk in the store."""
