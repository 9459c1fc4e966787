import numpy as np
import pytest

from monofourier import kernels
from monofourier.influence import random_monotone_table


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return kernels.BACKENDS[request.param]


def monotone_tables(count, max_dim=12, seed=7):
    """Deterministic bank of random monotone [0,1]-valued tables with d in 1..max_dim."""
    g = np.random.default_rng(seed)
    return [random_monotone_table(1 + k % max_dim, g) for k in range(count)]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
