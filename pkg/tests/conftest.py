import numpy as np
import pytest

from bgcs.data import BinaryTable, SeedSpec


@pytest.fixture
def seed():
    return SeedSpec(12345, 0)


@pytest.fixture
def small_table():
    rng = np.random.default_rng(7)
    x = (rng.random((60, 6)) < [0.2, 0.5, 0.7, 0.1, 0.4, 0.9]).astype(np.uint8)
    y = (x[:, 0] | x[:, 3]).astype(np.uint8)
    return BinaryTable(x, tuple(f"c{j}" for j in range(6)), y)


def random_table(rng, n_rows, n_features, labels=True):
    x = (rng.random((n_rows, n_features)) < rng.uniform(0.1, 0.9, n_features)).astype(np.uint8)
    y = rng.integers(0, 2, n_rows) if labels else None
    return BinaryTable(x, tuple(f"f{j}" for j in range(n_features)), y)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
