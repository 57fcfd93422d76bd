import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tradecluster.fixtures import blobs_csv, planted_blobs, synthetic_trade_table  # noqa: E402


@pytest.fixture(scope="session")
def blobs():
    return planted_blobs(seed=0)


@pytest.fixture
def blobs_path(tmp_path, blobs):
    path = tmp_path / "blobs.csv"
    path.write_text(blobs_csv(blobs[0]), encoding="utf-8")
    return path


@pytest.fixture
def trade_path(tmp_path):
    path = tmp_path / "trade.csv"
    path.write_text(synthetic_trade_table(), encoding="utf-8")
    return path


@pytest.fixture
def write_csv(tmp_path):
    def write(text, name="table.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return write


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")
