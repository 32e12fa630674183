import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# filled by test_acceptance.py; printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


@st.composite
def trajectories(draw, max_N=3, max_n=6):
    N = draw(st.integers(1, max_N))
    n = draw(st.integers(1, max_n))
    traj = draw(st.lists(st.integers(1, N), min_size=n + 1, max_size=n + 1))
    return N, traj


@st.composite
def count_matrices(draw, max_N=3, max_n=6, positive_rows=False):
    """Arbitrary count matrices (feasible or not) with total at most ``max_n``."""
    N = draw(st.integers(1, max_N))
    rows = [[0] * N for _ in range(N)]
    if positive_rows:
        for a in range(N):
            rows[a][draw(st.integers(0, N - 1))] += 1
    extra = draw(st.integers(0 if positive_rows else 1, max(max_n - sum(map(sum, rows)), 1)))
    for _ in range(extra):
        rows[draw(st.integers(0, N - 1))][draw(st.integers(0, N - 1))] += 1
    return rows


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
