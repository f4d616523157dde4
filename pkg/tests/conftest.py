import numpy as np
import pytest


def _vertex_hits(region, points, radius):
    """Per point: does ``region`` have a pixel within ``radius`` of it."""
    idx = np.argwhere(region)
    if len(idx) == 0:
        return [False] * len(points)
    return [bool(np.min(np.hypot(*(idx - p).T)) <= radius) for p in np.asarray(points)]


@pytest.fixture
def vertex_hits():
    return _vertex_hits


def pearson(a, b):
    return float(np.corrcoef(np.ravel(a), np.ravel(b))[0, 1])


@pytest.fixture
def corr():
    return pearson


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        lines.append((number, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
