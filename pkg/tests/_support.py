"""Independent oracles and record renderers shared across test modules.

Everything here is deliberately written against first principles (sorting,
counting, scanning text) rather than by calling back into the code under
test, so agreement is evidence and not tautology.
"""

from __future__ import annotations

import csv
import html
import io
import json
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from chronomap.chunker import GlobalSummary
    from chronomap.model import Dataset

Record = tuple[str, str, str, "str | int | float | None"]

# One (name, passed, detail) row per acceptance criterion; the terminal
# summary hook in conftest prints them after the run.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_acceptance(name: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((name, passed, detail))


def edge_scan_bin(value: float, vmin: float, vmax: float, bins: int) -> int:
    """Count how many bin edges lie at or below the value."""
    edges = [vmin + (vmax - vmin) * b / bins for b in range(1, bins)]
    return min(sum(1 for edge in edges if edge <= value), bins - 1)


def sort_split_bins(sample: Sequence[float], bins: int) -> dict[float, int]:
    """Quantile bin of each distinct sample member, from sorted rank fractions.

    A member at sorted position i (of n) has rank fraction i/n and lies in
    the quantile interval [b/B, (b+1)/B) that contains that fraction. The
    interval is found by scanning, not by reproducing any closed form.
    """
    ordered = sorted(sample)
    n = len(ordered)
    out: dict[float, int] = {}
    for position, value in enumerate(ordered):
        fraction = position / n
        for b in range(bins):
            if b / bins <= fraction < (b + 1) / bins:
                out[value] = b
                break
    return out


def reassembly_mismatches(original: "Dataset", rebuilt: "Dataset") -> list[str]:
    """Cell-by-cell comparison, independent of Dataset.__eq__."""
    problems = []
    if rebuilt.region_texts != original.region_texts:
        problems.append("region lists differ")
    if rebuilt.axis != original.axis:
        problems.append("axes differ")
    for region in original.region_texts:
        for indicator in original.indicator_ids:
            for ordinal in range(original.axis.count):
                a = original.value(region, ordinal, indicator)
                b = rebuilt.value(region, ordinal, indicator)
                if a != b and not (a is None and b is None):
                    problems.append(f"({region},{ordinal},{indicator}): {a!r} != {b!r}")
    return problems


def summary_mismatches(dataset: "Dataset", summary: "GlobalSummary") -> list[str]:
    """summary[t][r][p] must equal the track's source-indicator cell."""
    problems = []
    track_source = {t.name: t.indicator for t in dataset.tracks}
    for name, matrix in summary.tracks.items():
        for r, region in enumerate(summary.regions):
            for p in range(summary.n_periods):
                want = dataset.value(region, p, track_source[name])
                got = matrix[r][p]
                if want != got and not (want is None and got is None):
                    problems.append(f"[{name}][{region}][{p}]: {want!r} != {got!r}")
    return problems


def brute_force_coverage(records: Sequence[Record], n_regions: int, n_periods: int,
                         indicator: str) -> float:
    """Non-missing share of one indicator's grid, recounted from raw records."""
    filled = {
        (region, period)
        for region, period, ind, value in records
        if ind == indicator and value is not None and value != ""
    }
    return len(filled) / (n_regions * n_periods)


def to_csv(records: Sequence[Record]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["region", "period", "indicator", "value"])
    for region, period, indicator, value in records:
        writer.writerow([region, period, indicator, "" if value is None else value])
    return buffer.getvalue()


def to_json_rows(records: Sequence[Record]) -> str:
    return json.dumps([
        {"region": r, "period": p, "indicator": i, "value": v}
        for r, p, i, v in records
    ])


def to_json_columnar(records: Sequence[Record]) -> str:
    return json.dumps({
        "region": [r for r, _, _, _ in records],
        "period": [p for _, p, _, _ in records],
        "indicator": [i for _, _, i, _ in records],
        "value": [v for _, _, _, v in records],
    })


def to_html_table(records: Sequence[Record], *, junk: bool = True) -> str:
    rows = ["<tr><th>region</th><th>period</th><th>indicator</th><th>value</th></tr>"]
    for region, period, indicator, value in records:
        cells = [region, period, indicator, "" if value is None else str(value)]
        rows.append("<tr>" + "".join(f"<td>{html.escape(c)}</td>" for c in cells) + "</tr>")
    table = "<table>\n" + "\n".join(rows) + "\n</table>"
    if junk:
        return ("<html><head><title>export</title></head><body>"
                f"<p>preamble &amp; noise</p>{table}"
                "<table><tr><td>a second table to be ignored</td></tr></table>"
                "</body></html>")
    return table


ALL_RENDERERS = {
    "csv": to_csv,
    "json-rows": to_json_rows,
    "json-columnar": to_json_columnar,
    "html-table": to_html_table,
}
