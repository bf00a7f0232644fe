import random
from itertools import product
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

WORKED = [[1, -2], [-1, 2], [1, 2, 3], [-1, -3], [-3, 4], [-1, -4]]
HTE_EXAMPLE = [[1, 3], [-2, 3], [1, 2]]
PROBE_CARRIER = [[-1, 2], [-1, 3], [-1, 4], [-1, -5], [-1, -7], [1, 2], [1, -4], [1, 6], [1, 7]]
ER_EXAMPLE = [[2, 3, 4], [2, 3, 5], [2, 3, -6], [2, 3, 7]]


def random_clauses(rng, max_vars=16, max_clauses=64, widths=(1, 4)):
    n = rng.randint(widths[0], max_vars)
    m = rng.randint(0, max_clauses)
    clauses = []
    for _ in range(m):
        k = rng.randint(widths[0], min(widths[1], n))
        vs = rng.sample(range(1, n + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return n, clauses


def truth_table_models(clauses, n):
    """All models over 1..n by plain enumeration, as frozensets of literals."""
    out = set()
    for bits in product([True, False], repeat=n):
        lits = {v if b else -v for v, b in zip(range(1, n + 1), bits)}
        if all(any(l in lits for l in c) for c in clauses):
            out.add(frozenset(lits))
    return out


@pytest.fixture
def rng():
    return random.Random(20111)


_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and report.when == "call":
        _criteria.append((marker.args[0], marker.args[1], report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, duration in sorted(_criteria):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} ({duration:.2f}s) {title}")
