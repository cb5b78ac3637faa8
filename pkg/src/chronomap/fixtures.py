"""Synthetic fixtures: datasets shaped like real crisis-monitoring feeds.

Nothing here touches the network. The conflict-shaped fixture mirrors a
two-decade monthly country-level feed (141 countries x 240 months x 60
indicators, two display tracks); the pandemic-shaped one is a smaller
daily feed. Both are written as ingestable source files plus an ingest
spec, so the whole pipeline gets exercised end to end.
"""

from __future__ import annotations

import io
import json
import random
from dataclasses import dataclass
from pathlib import Path

from .ingest import IngestSpec
from .model import Cell, Dataset, Granularity, Indicator, PeriodAxis, Track
from .regions import RegionCode, default_registry

CONFLICT_REGIONS = 141
CONFLICT_MONTHS = 240
CONFLICT_INDICATORS = 60


@dataclass(frozen=True)
class FixturePaths:
    data: Path
    spec: Path
    map: Path


def conflict_countries(n: int = CONFLICT_REGIONS) -> tuple[str, ...]:
    """First n country codes of the bundled registry, alphabetically."""
    countries = sorted(e.code.text for e in default_registry() if not e.code.is_subdivision)
    return tuple(countries[:n])


def _month_labels(first_year: int, months: int) -> list[str]:
    base = first_year * 12
    return [f"{(base + i) // 12:04d}-{(base + i) % 12 + 1:02d}" for i in range(months)]


def conflict_spec() -> IngestSpec:
    return IngestSpec(
        format="csv",
        granularity=Granularity.MONTHLY,
        tracks=(Track("ground_truth", "intensity_true"), Track("prediction", "intensity_pred")),
    )


def write_conflict_fixture(outdir: str | Path, seed: int = 2024,
                           n_regions: int = CONFLICT_REGIONS,
                           n_months: int = CONFLICT_MONTHS,
                           n_indicators: int = CONFLICT_INDICATORS) -> FixturePaths:
    """CSV + ingest spec + map for the conflict-shaped dataset.

    Two intensity indicators have full coverage and feed the tracks; the
    remaining ones are sparse event counts with late starts and gaps, so
    chunks carry a realistic mix of small integers and MISSING cells.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    countries = conflict_countries(n_regions)
    labels = _month_labels(2000, n_months)
    count_indicators = [f"indicator_{i:02d}" for i in range(n_indicators - 2)]

    buffer = io.StringIO()
    buffer.write("region,period,indicator,value\n")
    for country in countries:
        # Smoothly varying intensity plus a noisy prediction of it.
        level = rng.uniform(0.0, 400.0)
        for i, label in enumerate(labels):
            level = max(0.0, level + rng.uniform(-25.0, 25.0))
            pred = level * rng.uniform(0.7, 1.3)
            buffer.write(f"{country},{label},intensity_true,{level:.2f}\n")
            buffer.write(f"{country},{label},intensity_pred,{pred:.2f}\n")
        for indicator in count_indicators:
            mean = rng.uniform(1.0, 60.0)
            start = rng.randrange(n_months // 4) if rng.random() < 0.3 else 0
            for i in range(start, n_months):
                if rng.random() < 0.12:
                    continue  # gap -> densified to MISSING
                value = int(rng.expovariate(1.0 / mean))
                buffer.write(f"{country},{labels[i]},{indicator},{value}\n")

    data_path = outdir / "data.csv"
    data_path.write_text(buffer.getvalue(), encoding="utf-8")
    spec_path = outdir / "ingest-spec.json"
    spec_path.write_text(conflict_spec().to_json() + "\n", encoding="utf-8")
    map_path = outdir / "map.svg"
    map_path.write_bytes(fixture_map(countries))
    return FixturePaths(data_path, spec_path, map_path)


def pandemic_spec() -> IngestSpec:
    return IngestSpec(
        format="json-columnar",
        granularity=Granularity.DAILY,
        tracks=(Track("confirmed", "cases"), Track("smoothed", "cases_7day")),
    )


def write_pandemic_fixture(outdir: str | Path, seed: int = 7,
                           n_regions: int = 25, n_days: int = 180,
                           n_indicators: int = 10) -> FixturePaths:
    """Columnar-JSON daily feed: case counts per country over six months."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    countries = conflict_countries(n_regions)
    axis = PeriodAxis(Granularity.DAILY, "2020-03-01", n_days)
    labels = [axis.label(i) for i in range(n_days)]
    extra = [f"metric_{i}" for i in range(n_indicators - 2)]

    columns: dict[str, list] = {"region": [], "period": [], "indicator": [], "value": []}

    def put(region: str, label: str, indicator: str, value: Cell) -> None:
        columns["region"].append(region)
        columns["period"].append(label)
        columns["indicator"].append(indicator)
        columns["value"].append(value)

    for country in countries:
        wave = rng.uniform(5.0, 300.0)
        recent: list[float] = []
        for label in labels:
            wave = max(0.0, wave * rng.uniform(0.93, 1.09))
            cases = int(wave)
            recent.append(cases)
            if len(recent) > 7:
                recent.pop(0)
            put(country, label, "cases", cases)
            put(country, label, "cases_7day", round(sum(recent) / len(recent), 2))
        for indicator in extra:
            scale = rng.uniform(0.5, 40.0)
            for label in labels:
                if rng.random() < 0.2:
                    continue
                put(country, label, indicator, round(rng.expovariate(1.0 / scale), 1))

    data_path = outdir / "data.json"
    data_path.write_text(json.dumps(columns), encoding="utf-8")
    spec_path = outdir / "ingest-spec.json"
    spec_path.write_text(pandemic_spec().to_json() + "\n", encoding="utf-8")
    map_path = outdir / "map.svg"
    map_path.write_bytes(fixture_map(countries))
    return FixturePaths(data_path, spec_path, map_path)


DEMO_REGIONS = ("DE", "FR", "IT")


def demo_spec() -> IngestSpec:
    return IngestSpec(
        format="csv",
        granularity=Granularity.MONTHLY,
        tracks=(Track("ground_truth", "cases"), Track("prediction", "cases_pred")),
        indicator_meta=(
            Indicator("cases", "Reported cases", "count"),
            Indicator("cases_pred", "Predicted cases", "count"),
            Indicator("hospital_load", "Hospital load", "percent"),
        ),
    )


def write_demo_fixture(outdir: str | Path, seed: int = 3) -> FixturePaths:
    """Three regions x twelve months; small enough to eyeball."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    labels = _month_labels(2020, 12)
    lines = ["region,period,indicator,value"]
    for region in DEMO_REGIONS:
        level = rng.uniform(20.0, 120.0)
        for i, label in enumerate(labels):
            level = max(0.0, level + rng.uniform(-15.0, 20.0))
            lines.append(f"{region},{label},cases,{int(level)}")
            lines.append(f"{region},{label},cases_pred,{level * rng.uniform(0.8, 1.2):.2f}")
            # one gap per region to keep MISSING on every code path
            if i != (hash(region) % 12):
                lines.append(f"{region},{label},hospital_load,{rng.uniform(1, 99):.1f}")
    data_path = outdir / "data.csv"
    data_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    spec_path = outdir / "ingest-spec.json"
    spec_path.write_text(demo_spec().to_json() + "\n", encoding="utf-8")
    map_path = outdir / "map.svg"
    map_path.write_bytes(fixture_map(DEMO_REGIONS))
    return FixturePaths(data_path, spec_path, map_path)


def fixture_map(regions: tuple[str, ...] | list[str], cell: int = 24) -> bytes:
    """Abstract SVG map: one square path per region, id = region code.

    Every third element styles itself inline so fill patching has to win
    over author styles; a decorative background carries no id at all.
    """
    import math

    cols = max(1, math.ceil(math.sqrt(len(regions))))
    rows = max(1, math.ceil(len(regions) / cols))
    width, height = cols * cell, rows * cell
    parts = [
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>",
        f"<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" "
        f"viewBox=\"0 0 {width} {height}\">",
        f"  <rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>",
    ]
    for i, region in enumerate(regions):
        x, y = (i % cols) * cell, (i // cols) * cell
        d = f"M{x + 1} {y + 1}h{cell - 2}v{cell - 2}h{-(cell - 2)}z"
        if i % 3 == 0:
            parts.append(f"  <path id=\"{region}\" d=\"{d}\" style=\"stroke:#333333;fill:#eeeeee\"/>")
        elif i % 3 == 1:
            parts.append(f"  <path id=\"{region}\" d=\"{d}\" fill=\"#eeeeee\"/>")
        else:
            parts.append(f"  <path data-id=\"{region}\" d=\"{d}\"/>")
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


_RANDOM_REGION_POOL = (
    "AR", "BR", "CN", "DE", "DE-BY", "DE-BE", "ES", "FR", "FR-75", "GB",
    "IN", "IT", "JP", "KE", "MX", "NG", "PL", "TR", "US", "US-CA",
)


def make_random_dataset(seed: int, max_regions: int = 10, max_periods: int = 24,
                        max_indicators: int = 5,
                        granularity: Granularity | None = None) -> Dataset:
    """Small randomized dataset for property tests; no registry involved."""
    rng = random.Random(seed)
    if granularity is None:
        granularity = rng.choice(list(Granularity))
    n_regions = rng.randint(1, max_regions)
    n_periods = rng.randint(1, max_periods)
    n_indicators = rng.randint(1, max_indicators)
    region_texts = sorted(rng.sample(_RANDOM_REGION_POOL, n_regions))
    regions = tuple(RegionCode.from_text(t) for t in region_texts)
    indicators = tuple(Indicator(f"ind_{i}") for i in range(n_indicators))
    first = "2019-11" if granularity is Granularity.MONTHLY else "2019-11-28"
    axis = PeriodAxis(granularity, first, n_periods)

    def cell() -> Cell:
        roll = rng.random()
        if roll < 0.15:
            return None
        if roll < 0.45:
            return float(rng.randint(-1000, 100000))
        if roll < 0.55:
            return rng.choice((0.0, -0.0, 1e-9, 2.0 ** 53, -2.0 ** 53, 0.1, 1.5e300))
        return round(rng.uniform(-1e6, 1e6), rng.randint(0, 6))

    cells = {
        r.text: {i.id: tuple(cell() for _ in range(n_periods)) for i in indicators}
        for r in regions
    }
    n_tracks = rng.randint(1, min(2, n_indicators))
    tracks = tuple(
        Track(f"track_{j}", indicators[rng.randrange(n_indicators)].id) for j in range(n_tracks)
    )
    return Dataset(axis=axis, regions=regions, indicators=indicators, tracks=tracks,
                   cells=cells, provenance=f"random fixture seed={seed}")
