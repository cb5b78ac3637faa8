"""Color scales and SVG frame rendering.

A :class:`ColorScale` maps finite values into one of B ordered ramp colors,
either by linear division of a [min, max] domain or by quantile intervals
over a stored sample. :func:`color_frame` applies a scale to one period of
a global summary, and :func:`render_svg` patches the resulting colors into
an SVG map whose elements carry ISO region ids.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .chunker import GlobalSummary
from .errors import DegenerateScale, MalformedSvg, PeriodOutOfRange, UnknownTrack
from .model import Cell, Period

# Single-hue light-to-dark blues; a safe default for sequential data.
DEFAULT_RAMP = (
    "#eff3ff", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#084594",
)
MISSING_COLOR = "#cccccc"

_HEX_COLOR_RE = re.compile(r"#[0-9a-f]{6}")

LINEAR = "linear"
QUANTILE = "quantile"


def _check_color(color: str) -> str:
    color = color.lower()
    if not _HEX_COLOR_RE.fullmatch(color):
        raise ValueError(f"{color!r} is not a #rrggbb color")
    return color


def _rgb(color: str) -> tuple[int, int, int]:
    return int(color[1:3], 16), int(color[3:5], 16), int(color[5:7], 16)


def make_ramp(bins: int, anchors: tuple[str, ...] = DEFAULT_RAMP) -> tuple[str, ...]:
    """A ramp of exactly ``bins`` colors, interpolated between the anchors."""
    if bins < 2:
        raise DegenerateScale(f"a ramp needs at least 2 colors, got {bins}")
    anchors = tuple(_check_color(c) for c in anchors)
    if bins == len(anchors):
        return anchors
    points = [_rgb(c) for c in anchors]
    out = []
    for i in range(bins):
        x = i * (len(points) - 1) / (bins - 1)
        lo = min(int(math.floor(x)), len(points) - 2)
        frac = x - lo
        rgb = tuple(round(a + (b - a) * frac) for a, b in zip(points[lo], points[lo + 1]))
        out.append("#{:02x}{:02x}{:02x}".format(*rgb))
    return tuple(out)


def _finite(value: Cell) -> bool:
    return isinstance(value, (int, float)) and math.isfinite(value)


@dataclass(frozen=True)
class ColorScale:
    """Value -> bin -> color mapping.

    ``domain`` holds ``(min, max)`` for linear scales and the full sorted
    sample for quantile scales; quantile intervals are left-closed, so a
    value equal to an interval's lower edge falls into that interval.
    """

    kind: str
    bins: int
    ramp: tuple[str, ...]
    domain: tuple[float, ...]
    missing_color: str = MISSING_COLOR

    @classmethod
    def linear(cls, vmin: float, vmax: float, bins: int = 7,
               ramp: tuple[str, ...] | None = None,
               missing_color: str = MISSING_COLOR) -> "ColorScale":
        if not (_finite(vmin) and _finite(vmax)):
            raise DegenerateScale(f"linear domain [{vmin}, {vmax}] is not finite")
        if not vmin < vmax:
            raise DegenerateScale(f"linear domain needs min < max, got [{vmin}, {vmax}]")
        return cls(LINEAR, bins, ramp or make_ramp(bins), (float(vmin), float(vmax)),
                   _check_color(missing_color))

    @classmethod
    def quantile(cls, sample: Iterable[float], bins: int = 7,
                 ramp: tuple[str, ...] | None = None,
                 missing_color: str = MISSING_COLOR) -> "ColorScale":
        values = tuple(sorted(float(v) for v in sample if _finite(v)))
        if not values:
            raise DegenerateScale("quantile scale needs a non-empty finite sample")
        return cls(QUANTILE, bins, ramp or make_ramp(bins), values, _check_color(missing_color))

    def __post_init__(self):
        if self.kind not in (LINEAR, QUANTILE):
            raise DegenerateScale(f"unknown scale kind {self.kind!r}")
        if self.bins < 2:
            raise DegenerateScale(f"a scale needs at least 2 bins, got {self.bins}")
        if len(self.ramp) != self.bins:
            raise DegenerateScale(
                f"ramp has {len(self.ramp)} colors for {self.bins} bins")
        for color in (*self.ramp, self.missing_color):
            if not _HEX_COLOR_RE.fullmatch(color):
                raise DegenerateScale(f"{color!r} is not a #rrggbb color")

    def color(self, value: Cell) -> str:
        if not _finite(value):
            return self.missing_color
        return self.ramp[bin_index(float(value), self)]


def bin_index(value: float, scale: ColorScale) -> int:
    """Bin of a finite value under the scale, always in [0, bins-1]."""
    if not _finite(value):
        raise ValueError(f"bin_index needs a finite value, got {value!r}")
    if scale.kind == LINEAR:
        vmin, vmax = scale.domain
        # Clamp before flooring: near-degenerate domains can push the
        # intermediate product past the float range.
        position = (value - vmin) / (vmax - vmin) * scale.bins
        raw = math.floor(min(max(position, 0.0), scale.bins - 1.0))
    else:
        # Left-closed quantile intervals: the bin of the last sample point
        # at or below the value; below-sample values land in bin 0.
        n = len(scale.domain)
        rank = bisect_right(scale.domain, value) - 1
        raw = max(0, rank) * scale.bins // n
    return min(max(raw, 0), scale.bins - 1)


def scale_for_track(summary: GlobalSummary, track: str, kind: str = LINEAR,
                    bins: int = 7, ramp: tuple[str, ...] | None = None) -> ColorScale:
    """Scale whose domain spans the track's whole region x period range.

    Colors are comparable across the full time axis, not re-normalised per
    period. Tracks with no finite values fall back to a [0, 1] linear
    domain; a single distinct value v widens to [v, v+1].
    """
    if track not in summary.tracks:
        raise UnknownTrack(f"track {track!r} is not in the summary")
    values = [v for row in summary.tracks[track] for v in row if _finite(v)]
    if kind == QUANTILE and values:
        return ColorScale.quantile(values, bins=bins, ramp=ramp)
    if kind not in (LINEAR, QUANTILE):
        raise DegenerateScale(f"unknown scale kind {kind!r}")
    if not values:
        return ColorScale.linear(0.0, 1.0, bins=bins, ramp=ramp)
    vmin, vmax = min(values), max(values)
    if vmin == vmax:
        vmax = vmin + 1.0
    return ColorScale.linear(vmin, vmax, bins=bins, ramp=ramp)


@dataclass
class ChoroplethFrame:
    """One period's region -> color assignment, with the rendered SVG once built."""

    period: Period
    track: str
    assignment: dict[str, str]
    svg: bytes | None = None
    unmatched: tuple[str, ...] = field(default=())

    def to_doc(self) -> dict[str, str]:
        return dict(self.assignment)


def color_frame(summary: GlobalSummary, period: Period, track: str,
                scale: ColorScale) -> ChoroplethFrame:
    """Assign every summary region a color for one period."""
    if track not in summary.tracks:
        raise UnknownTrack(f"track {track!r} is not in the summary")
    if not 0 <= period.ordinal < summary.n_periods:
        raise PeriodOutOfRange(
            f"ordinal {period.ordinal} outside 0..{summary.n_periods - 1}")
    matrix = summary.tracks[track]
    assignment = {
        region: scale.color(matrix[i][period.ordinal])
        for i, region in enumerate(summary.regions)
    }
    return ChoroplethFrame(period=period, track=track, assignment=assignment)


_XMLNS_RE = re.compile(rb'xmlns(?::([A-Za-z_][\w.-]*))?\s*=\s*"([^"]*)"')
_XML_DECL_RE = re.compile(rb"^\s*<\?xml[^>]*\?>")


def _patch_style(style: str, color: str) -> str:
    """Replace or append the fill declaration, preserving other properties."""
    parts = []
    patched = False
    for chunk in style.split(";"):
        if not chunk.strip():
            continue
        prop, _, _ = chunk.partition(":")
        if prop.strip().lower() == "fill":
            parts.append(f"fill:{color}")
            patched = True
        else:
            parts.append(chunk.strip())
    if not patched:
        parts.append(f"fill:{color}")
    return ";".join(parts)


def patch_svg(map_bytes: bytes, assignment: Mapping[str, str]) -> tuple[bytes, tuple[str, ...]]:
    """Set fills on elements whose id (or data-id, when id is absent) is assigned.

    Returns the rewritten document and the assignment keys that matched no
    element. The fill is set both as an attribute and inside any existing
    inline style, so it wins regardless of how the map was authored.
    """
    # Re-register every namespace so prefixes survive the round-trip.
    for prefix, uri in _XMLNS_RE.findall(map_bytes):
        ET.register_namespace(prefix.decode("ascii"), uri.decode("utf-8"))
    try:
        root = ET.fromstring(map_bytes)
    except ET.ParseError as exc:
        raise MalformedSvg(f"map is not well-formed XML: {exc}") from None

    matched: set[str] = set()
    for element in root.iter():
        key = element.get("id")
        if key is None:
            key = element.get("data-id")
        if key is None:
            continue
        color = assignment.get(key)
        if color is None:
            continue
        matched.add(key)
        element.set("fill", color)
        style = element.get("style")
        if style is not None:
            element.set("style", _patch_style(style, color))

    body = ET.tostring(root, encoding="unicode").encode("utf-8")
    if _XML_DECL_RE.match(map_bytes):
        body = b"<?xml version='1.0' encoding='utf-8'?>\n" + body
    unmatched = tuple(sorted(set(assignment) - matched))
    return body, unmatched


def render_svg(frame: ChoroplethFrame, map_bytes: bytes) -> bytes:
    """Fill the frame's colors into the map; records unmatched regions on the frame."""
    svg, unmatched = patch_svg(map_bytes, frame.assignment)
    frame.svg = svg
    frame.unmatched = unmatched
    return svg
