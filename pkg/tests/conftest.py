from pathlib import Path

import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption("--ph2-manifest", default=None, help="manifest CSV of the PH2 dataset (enables criterion 6)")
    parser.addoption("--ph2-exclude", default=None, help="optional exclusion list for the filtered subset")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ph2_manifest(request):
    path = request.config.getoption("--ph2-manifest")
    if not path:
        pytest.skip("PH2 dataset not supplied (--ph2-manifest)")
    if not Path(path).is_file():
        pytest.skip(f"PH2 manifest {path} not found")
    return Path(path)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def verdict(request):
    """Record a criterion's outcome; call as ``verdict(n, ok, detail)`` before asserting.
    ``ok=None`` marks a skipped criterion."""

    def record(number, ok, detail=""):
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES[number] = f"criterion {number}: {status}  {detail}".rstrip()
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
