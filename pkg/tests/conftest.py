import numpy as np
import pytest

from perctri.percolation import Configuration, config_from_bits


def all_open(n: int) -> Configuration:
    return config_from_bits(n, np.ones((2 * n + 1) ** 2, dtype=np.uint8))


def all_closed(n: int) -> Configuration:
    return config_from_bits(n, np.zeros((2 * n + 1) ** 2, dtype=np.uint8))


def from_sites(n: int, open_sites) -> Configuration:
    """Configuration with exactly the given sites open."""
    w = 2 * n + 1
    grid = np.zeros((w, w), dtype=np.uint8)
    for x, y in open_sites:
        grid[y + n, x + n] = 1
    return config_from_bits(n, grid.reshape(-1))


def closed_sites(n: int, sites) -> Configuration:
    """All-open configuration with exactly the given sites closed."""
    w = 2 * n + 1
    grid = np.ones((w, w), dtype=np.uint8)
    for x, y in sites:
        grid[y + n, x + n] = 0
    return config_from_bits(n, grid.reshape(-1))


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
