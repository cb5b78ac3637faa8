import json
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from chronomap import choropleth
from chronomap.chunker import deserialize, load_store
from chronomap.server import ServerConfig, create_app

ENDPOINTS = ["/api/meta", "/api/summary", "/api/detail/DE", "/api/frame/0", "/api/map"]


@pytest.fixture(scope="module")
def tiny_client(tiny_store, demo_paths):
    app = create_app(ServerConfig(data_dir=tiny_store, map_path=demo_paths.map))
    with TestClient(app) as client:
        yield client


# ---- /api/meta ----

def test_meta_shape(tiny_client):
    doc = tiny_client.get("/api/meta").json()
    assert len(doc["regions"]) == 3
    assert doc["periods"]["count"] == 2
    assert doc["granularity"] == "monthly"
    assert {t["name"] for t in doc["tracks"]} == {"ground_truth", "prediction"}
    assert "summary" in doc["hashes"] and "chunks" in doc["hashes"]


def test_meta_lists_indicators(demo_client):
    doc = demo_client.get("/api/meta").json()
    ids = {i["id"] for i in doc["indicators"]}
    assert ids == {"cases", "cases_pred", "hospital_load"}


def test_missing_store_is_500(tmp_path, demo_paths):
    app = create_app(ServerConfig(data_dir=tmp_path / "nope", map_path=demo_paths.map))
    client = TestClient(app, raise_server_exceptions=False)
    response = client.get("/api/meta")
    assert response.status_code == 500
    body = response.json()
    assert body["error"] == "StoreError" and "detail" in body


def test_corrupt_store_is_500_everywhere(tmp_path, demo_store, demo_paths):
    import shutil

    broken = tmp_path / "broken"
    shutil.copytree(demo_store, broken)
    (broken / "summary.json").write_bytes(b"{}")
    app = create_app(ServerConfig(data_dir=broken, map_path=demo_paths.map))
    client = TestClient(app, raise_server_exceptions=False)
    for url in ENDPOINTS:
        if url == "/api/map":
            # The base map is static and does not depend on the store.
            assert client.get(url).status_code == 200
            continue
        response = client.get(url)
        assert response.status_code == 500, url
        assert response.json()["error"] in ("StoreError", "CorruptPayload"), url


# ---- /api/summary ----

def test_summary_bytes_match_store(demo_client, demo_store):
    store = load_store(demo_store)
    response = demo_client.get("/api/summary")
    assert response.status_code == 200
    assert response.content == store.summary_bytes
    assert response.headers["etag"] == f'"{store.summary_hash}"'


# ---- /api/detail ----

def test_detail_chunk(demo_client, demo_dataset):
    response = demo_client.get("/api/detail/DE")
    assert response.status_code == 200
    chunk = deserialize(response.content)
    assert chunk.region.text == "DE"
    assert chunk.series["cases"] == demo_dataset.series("DE", "cases")


def test_detail_case_normalised(demo_client):
    upper = demo_client.get("/api/detail/DE")
    lower = demo_client.get("/api/detail/de")
    assert lower.status_code == 200
    assert lower.content == upper.content


def test_detail_unknown_region_404(demo_client):
    response = demo_client.get("/api/detail/XZ")
    assert response.status_code == 404
    assert response.json()["error"] == "UnknownRegion"


def test_detail_malformed_400(demo_client):
    response = demo_client.get("/api/detail/Germany")
    assert response.status_code == 400
    assert response.json()["error"] == "MalformedCode"


def test_detail_subdivision_served_from_country_bundle(tmp_path, demo_paths):
    from chronomap.chunker import write_store
    from chronomap.fixtures import make_random_dataset

    ds = make_random_dataset(9)  # this seed draws DE-BE, DE-BY and FR-75
    sub = next(r.text for r in ds.regions if r.is_subdivision)
    write_store(ds, tmp_path)
    app = create_app(ServerConfig(data_dir=tmp_path, map_path=demo_paths.map))
    client = TestClient(app)
    response = client.get(f"/api/detail/{sub}")
    assert response.status_code == 200
    assert deserialize(response.content).region.text == sub


# ---- /api/frame ----

def test_frame_json_matches_module(demo_client, demo_store):
    store = load_store(demo_store)
    scale = choropleth.scale_for_track(store.summary, "ground_truth")
    for ordinal in range(store.axis.count):
        body = demo_client.get(f"/api/frame/{ordinal}?track=ground_truth").json()
        direct = choropleth.color_frame(
            store.summary, store.axis.period(ordinal), "ground_truth", scale)
        assert body == direct.assignment, f"ordinal {ordinal}"


def test_frame_default_track_is_first(demo_client):
    default = demo_client.get("/api/frame/0").json()
    explicit = demo_client.get("/api/frame/0?track=ground_truth").json()
    assert default == explicit


def test_frame_quantile_scale(demo_client):
    linear = demo_client.get("/api/frame/0").json()
    quantile = demo_client.get("/api/frame/0?scale=quantile").json()
    assert set(linear) == set(quantile)


def test_frame_out_of_range_404(demo_client):
    response = demo_client.get("/api/frame/400")
    assert response.status_code == 404
    assert response.json()["error"] == "PeriodOutOfRange"
    assert demo_client.get("/api/frame/-1").status_code == 404


def test_frame_unknown_track_400(demo_client):
    response = demo_client.get("/api/frame/0?track=nope")
    assert response.status_code == 400
    assert response.json()["error"] == "UnknownTrack"


def test_frame_unknown_scale_400(demo_client):
    response = demo_client.get("/api/frame/0?scale=log")
    assert response.status_code == 400
    assert response.json()["error"] == "UnknownScale"


def test_frame_non_integer_ordinal_400(demo_client):
    assert demo_client.get("/api/frame/abc").status_code == 400


def test_frame_svg_negotiation(demo_client):
    response = demo_client.get("/api/frame/3", headers={"Accept": "image/svg+xml"})
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("image/svg+xml")
    root = ET.fromstring(response.content)
    assert root.tag.endswith("svg")
    json_body = demo_client.get("/api/frame/3")
    assert json_body.headers["content-type"].startswith("application/json")
    fills = {e.get("id") or e.get("data-id"): e.get("fill")
             for e in root.iter() if e.get("id") or e.get("data-id")}
    for region, color in json_body.json().items():
        assert fills[region] == color


# ---- /api/map ----

def test_map_served_verbatim(demo_client, demo_paths):
    response = demo_client.get("/api/map")
    assert response.status_code == 200
    assert response.content == demo_paths.map.read_bytes()
    assert response.headers["content-type"].startswith("image/svg+xml")


def test_map_unreadable_is_500(demo_store, tmp_path):
    app = create_app(ServerConfig(data_dir=demo_store, map_path=tmp_path / "gone.svg"))
    client = TestClient(app, raise_server_exceptions=False)
    response = client.get("/api/map")
    assert response.status_code == 500
    assert response.json()["error"] == "StoreError"


# ---- caching contract ----

def test_every_200_carries_etag_and_304s(demo_client):
    for url in ENDPOINTS:
        first = demo_client.get(url)
        assert first.status_code == 200, url
        etag = first.headers.get("etag")
        assert etag and etag.startswith('"') and etag.endswith('"'), url
        again = demo_client.get(url, headers={"If-None-Match": etag})
        assert again.status_code == 304, url
        assert again.content == b"", url
        assert again.headers.get("etag") == etag, url


def test_etag_mismatch_returns_body(demo_client):
    response = demo_client.get("/api/summary", headers={"If-None-Match": '"stale"'})
    assert response.status_code == 200 and response.content


def test_if_none_match_star_and_lists(demo_client):
    etag = demo_client.get("/api/summary").headers["etag"]
    assert demo_client.get("/api/summary",
                           headers={"If-None-Match": "*"}).status_code == 304
    assert demo_client.get(
        "/api/summary", headers={"If-None-Match": f'"other", {etag}'}).status_code == 304
    assert demo_client.get(
        "/api/summary", headers={"If-None-Match": f"W/{etag}"}).status_code == 304


# ---- statelessness and concurrency ----

def test_identical_requests_identical_bodies(demo_client):
    for url in ENDPOINTS:
        assert demo_client.get(url).content == demo_client.get(url).content, url


def test_parallel_clients_get_identical_bytes(demo_client):
    def fetch(_):
        return demo_client.get("/api/summary").content

    with ThreadPoolExecutor(max_workers=8) as pool:
        bodies = list(pool.map(fetch, range(16)))
    assert len({bytes(b) for b in bodies}) == 1


def test_cors_header_present(demo_client):
    response = demo_client.get("/api/meta", headers={"Origin": "http://localhost:5173"})
    assert response.headers.get("access-control-allow-origin") in ("*", "http://localhost:5173")


def test_error_body_shape(demo_client):
    body = demo_client.get("/api/detail/XZ").json()
    assert set(body) == {"error", "detail"}
    assert isinstance(body["error"], str) and isinstance(body["detail"], str)


def test_meta_is_valid_json_document(demo_client):
    raw = demo_client.get("/api/meta").content
    doc = json.loads(raw)
    assert doc["kind"] == "meta"
