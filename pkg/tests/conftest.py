import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import pytest

from chronomap import fixtures
from chronomap.chunker import load_store, write_store
from chronomap.fixtures import FixturePaths
from chronomap.ingest import ingest


def run_cli(*argv: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "chronomap.cli", *map(str, argv)],
        capture_output=True, text=True, timeout=300,
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from _support import ACCEPTANCE_RESULTS

    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        line = f"{name}: {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def demo_paths(tmp_path_factory) -> FixturePaths:
    return fixtures.write_demo_fixture(tmp_path_factory.mktemp("demo-fixture"))


@pytest.fixture(scope="session")
def demo_store(demo_paths, tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("demo-store")
    proc = run_cli("ingest", "--spec", demo_paths.spec, "--in", demo_paths.data, "--out", out)
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def demo_dataset(demo_store):
    return load_store(demo_store).reassemble()


@pytest.fixture(scope="session")
def demo_client(demo_store, demo_paths):
    from fastapi.testclient import TestClient

    from chronomap.server import ServerConfig, create_app

    app = create_app(ServerConfig(data_dir=demo_store, map_path=demo_paths.map))
    with TestClient(app) as client:
        yield client


@pytest.fixture(scope="session")
def tiny_store(tmp_path_factory) -> Path:
    """Three regions x two periods, the smallest interesting store."""
    csv_text = (
        "region,period,indicator,value\n"
        "DE,2021-01,cases,5\nDE,2021-02,cases,7\n"
        "FR,2021-01,cases,2\nFR,2021-02,cases,\n"
        "IT,2021-01,cases,9\nIT,2021-02,cases,4\n"
        "DE,2021-01,cases_pred,6\nDE,2021-02,cases_pred,8\n"
        "FR,2021-01,cases_pred,3\nFR,2021-02,cases_pred,1\n"
        "IT,2021-01,cases_pred,8\nIT,2021-02,cases_pred,5\n"
    )
    dataset = ingest(csv_text, fixtures.demo_spec())
    out = tmp_path_factory.mktemp("tiny-store")
    write_store(dataset, out)
    return out


@dataclass(frozen=True)
class ConflictBuild:
    fixture: FixturePaths
    store: Path
    stats: dict
    generate_seconds: float
    ingest_seconds: float
    stats_seconds: float


@pytest.fixture(scope="session")
def conflict_build(tmp_path_factory) -> ConflictBuild:
    """The full-size conflict-shaped pipeline, built once per session via the CLI."""
    import json

    root = tmp_path_factory.mktemp("conflict")
    t0 = time.perf_counter()
    paths = fixtures.write_conflict_fixture(root / "fixture")
    t1 = time.perf_counter()
    store = root / "store"
    proc = run_cli("ingest", "--spec", paths.spec, "--in", paths.data, "--out", store)
    t2 = time.perf_counter()
    assert proc.returncode == 0, proc.stderr
    proc = run_cli("stats", "--data", store, "--json")
    t3 = time.perf_counter()
    assert proc.returncode == 0, proc.stderr
    return ConflictBuild(
        fixture=paths,
        store=store,
        stats=json.loads(proc.stdout),
        generate_seconds=t1 - t0,
        ingest_seconds=t2 - t1,
        stats_seconds=t3 - t2,
    )
