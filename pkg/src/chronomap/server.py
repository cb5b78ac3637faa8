"""Read-only HTTP service over a persisted store.

Five endpoints: metadata, the eager summary, lazy per-region detail
chunks, computed choropleth frames, and the SVG map file. Every 200
response carries a strong ETag (the SHA-256 of the body) and honours
``If-None-Match`` with an empty 304. The store is loaded lazily on first
use and then shared immutably across requests; a corrupt or missing store
surfaces as a 500 on every request rather than a crash at startup.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, TypeVar

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import choropleth
from .chunker import SOFT_CHUNK_BUDGET, Store, canonical_json, content_hash, load_store, serialize
from .errors import (
    ChronomapError,
    CorruptPayload,
    DegenerateScale,
    MalformedCode,
    MalformedSvg,
    PeriodOutOfRange,
    StoreError,
    UnknownRegion,
    UnknownScale,
    UnknownTrack,
)
from .regions import RegionCode

SCALE_KINDS = {"default": choropleth.LINEAR, "quantile": choropleth.QUANTILE}

_STATUS_BY_ERROR = {
    MalformedCode: 400,
    UnknownTrack: 400,
    UnknownScale: 400,
    DegenerateScale: 400,
    UnknownRegion: 404,
    PeriodOutOfRange: 404,
    StoreError: 500,
    CorruptPayload: 500,
    MalformedSvg: 500,
}


@dataclass(frozen=True)
class ServerConfig:
    """Where the store and map live and how to listen."""

    data_dir: Path
    map_path: Path
    host: str = "127.0.0.1"
    port: int = 8080
    cors_origin: str = "*"
    soft_budget: int = SOFT_CHUNK_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "data_dir", Path(self.data_dir))
        object.__setattr__(self, "map_path", Path(self.map_path))


T = TypeVar("T")


class _Lazy:
    """Thread-safe memo of a loader; failures are retried, not cached."""

    def __init__(self, loader: Callable[[], T]):
        self._loader = loader
        self._lock = threading.Lock()
        self._value: T | None = None

    def get(self) -> T:
        with self._lock:
            if self._value is None:
                self._value = self._loader()
            return self._value


def _status_for(exc: ChronomapError) -> int:
    for kind, status in _STATUS_BY_ERROR.items():
        if isinstance(exc, kind):
            return status
    return 500


def _etag_matches(header: str, etag: str) -> bool:
    # If-None-Match uses weak comparison: a W/ prefix is ignored.
    for token in header.split(","):
        token = token.strip()
        if token == "*":
            return True
        if token.startswith("W/"):
            token = token[2:]
        if token == etag:
            return True
    return False


def _conditional(request: Request, body: bytes, media_type: str, etag_hex: str) -> Response:
    etag = f'"{etag_hex}"'
    header = request.headers.get("if-none-match")
    if header and _etag_matches(header, etag):
        return Response(status_code=304, headers={"ETag": etag})
    return Response(content=body, media_type=media_type, headers={"ETag": etag})


def create_app(config: ServerConfig) -> FastAPI:
    app = FastAPI(title="chronomap", docs_url=None, redoc_url=None, openapi_url=None)
    origin = config.cors_origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"] if origin == "*" else [origin],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    store_handle: _Lazy = _Lazy(lambda: load_store(config.data_dir))

    def _read_map() -> bytes:
        try:
            return config.map_path.read_bytes()
        except OSError as exc:
            raise StoreError(f"cannot read map file: {exc}") from None

    map_handle: _Lazy = _Lazy(_read_map)

    # Per-process caches; the store is immutable so entries never go stale.
    cache_lock = threading.Lock()
    detail_cache: dict[str, tuple[bytes, str]] = {}
    scale_cache: dict[tuple[str, str], choropleth.ColorScale] = {}

    @app.exception_handler(ChronomapError)
    async def _domain_error(_request: Request, exc: ChronomapError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": exc.code, "detail": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": "BadRequest", "detail": str(exc.errors()[:1])},
        )

    def _detail_payload(store: Store, region: RegionCode) -> tuple[bytes, str]:
        key = region.text
        with cache_lock:
            hit = detail_cache.get(key)
        if hit is not None:
            return hit
        if region.country not in store.chunk_hashes:
            raise UnknownRegion(f"no data for region {key}")
        member = store.bundle(region.country).member(key)
        if member is None:
            raise UnknownRegion(f"no data for region {key}")
        body = serialize(member)
        entry = (body, content_hash(body))
        with cache_lock:
            detail_cache[key] = entry
        return entry

    def _scale(store: Store, track: str, name: str) -> choropleth.ColorScale:
        kind = SCALE_KINDS.get(name)
        if kind is None:
            raise UnknownScale(f"scale {name!r} is not configured; "
                               f"expected one of {sorted(SCALE_KINDS)}")
        with cache_lock:
            hit = scale_cache.get((track, name))
        if hit is not None:
            return hit
        scale = choropleth.scale_for_track(store.summary, track, kind=kind)
        with cache_lock:
            scale_cache[(track, name)] = scale
        return scale

    @app.get("/api/meta")
    def get_meta(request: Request) -> Response:
        store = store_handle.get()
        return _conditional(request, store.meta_bytes, "application/json", store.meta_hash)

    @app.get("/api/summary")
    def get_summary(request: Request) -> Response:
        store = store_handle.get()
        return _conditional(request, store.summary_bytes, "application/json",
                            store.summary_hash)

    @app.get("/api/detail/{region}")
    def get_detail(region: str, request: Request) -> Response:
        store = store_handle.get()
        code = RegionCode.from_text(region)
        body, etag = _detail_payload(store, code)
        return _conditional(request, body, "application/json", etag)

    @app.get("/api/frame/{ordinal}")
    def get_frame(ordinal: int, request: Request, track: str | None = None,
                  scale: str = "default") -> Response:
        store = store_handle.get()
        if track is None:
            track = store.tracks[0].name
        if track not in store.summary.tracks:
            raise UnknownTrack(f"track {track!r} is not in this store")
        if not 0 <= ordinal < store.axis.count:
            raise PeriodOutOfRange(
                f"ordinal {ordinal} outside 0..{store.axis.count - 1}")
        frame = choropleth.color_frame(
            store.summary, store.axis.period(ordinal), track, _scale(store, track, scale))
        if "image/svg+xml" in request.headers.get("accept", ""):
            body = choropleth.render_svg(frame, map_handle.get())
            media = "image/svg+xml"
        else:
            body = canonical_json(frame.to_doc())
            media = "application/json"
        return _conditional(request, body, media, content_hash(body))

    @app.get("/api/map")
    def get_map(request: Request) -> Response:
        body = map_handle.get()
        return _conditional(request, body, "image/svg+xml", content_hash(body))

    return app


def run(config: ServerConfig) -> None:
    """Blocking uvicorn runner used by the command line."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="warning")
