import numpy as np
import pytest

from fsdem.data import Dataset

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def informative_dataset():
    """Feature 2 alone determines the label; the rest are noise."""
    rng = np.random.default_rng(7)
    n = 120
    y = np.repeat([0, 1], n // 2)
    x = rng.normal(size=(n, 5))
    x[:, 2] = y * 4.0 + rng.normal(scale=0.3, size=n)
    return Dataset(x, y, tuple(f"f{j}" for j in range(5)), "informative")
