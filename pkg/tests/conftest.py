import math

import numpy as np
import pytest

from lindley_est.distribution import draw

ACCEPTANCE_LINES = []


def mc_sums(theta, n, reps, seed, chunk=100_000):
    """Sample sums T for ``reps`` replications, drawn observation by observation."""
    rng = np.random.default_rng(seed)
    out = np.empty(reps)
    for start in range(0, reps, chunk):
        m = min(chunk, reps - start)
        out[start:start + m] = draw((m, n), theta, rng).sum(axis=1)
    return out


def mean_and_se(values):
    values = np.asarray(values, dtype=float)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


@pytest.fixture
def record_criterion():
    def record(number, title, passed, detail=""):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {title}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
