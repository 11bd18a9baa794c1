import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def perturbed_grid(k=8, jitter=0.01, seed=0):
    """k x k grid of cell centres, each nudged off the lattice."""
    r = np.random.default_rng(seed)
    c = (np.arange(k) + 0.5) / k
    xx, yy = np.meshgrid(c, c, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    return pts + r.uniform(-jitter, jitter, pts.shape)


# acceptance lines, echoed in the terminal summary so they land in the log
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical reproduction")
