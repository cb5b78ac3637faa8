"""chronomap: temporal-spatial indicator data, chunked and mapped.

Ingest country/subdivision time series, split them into an eagerly loaded
global summary plus lazily loaded per-region detail chunks, color
choropleth map frames, and serve everything over a small read-only HTTP
API for the bundled dashboard.
"""

from .errors import ChronomapError
from .model import (
    MISSING,
    Dataset,
    Granularity,
    Indicator,
    Period,
    PeriodAxis,
    Track,
    period_range,
)
from .regions import RegionCode, RegionRegistry, default_registry, parse_region_code, resolve_region_name

__version__ = "0.1.0"

__all__ = [
    "ChronomapError",
    "MISSING",
    "Dataset",
    "Granularity",
    "Indicator",
    "Period",
    "PeriodAxis",
    "Track",
    "period_range",
    "RegionCode",
    "RegionRegistry",
    "default_registry",
    "parse_region_code",
    "resolve_region_name",
    "__version__",
]
