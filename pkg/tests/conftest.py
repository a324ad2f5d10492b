"""Test configuration and fixtures for pytest."""
import numpy as np
import pytest
from hypothesis import settings

from family_deg8 import ParamSet8
from family_deg9 import ParamSet9
from numeric_core import MonicPoly, ToleranceConfig

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")


def _disk(rng, size, radius):
    r = radius * np.sqrt(rng.random(size))
    return r * np.exp(2j * np.pi * rng.random(size))


@pytest.fixture
def tolerances():
    return ToleranceConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def draw_params8(rng):
    """Factory for random ParamSet8 values drawn from a complex disk."""

    def draw(count, radius=1.0):
        return [ParamSet8(*map(complex, _disk(rng, 6, radius))) for _ in range(count)]

    return draw


@pytest.fixture
def draw_params9(rng):
    """Factory for random ParamSet9 values drawn from a complex disk."""

    def draw(count, radius=1.0):
        return [ParamSet9(*map(complex, _disk(rng, 6, radius))) for _ in range(count)]

    return draw


@pytest.fixture
def biquartic():
    """z^8 - 3z^4 + 2 = (z^4 - 1)(z^4 - 2)."""
    return MonicPoly(8, (2, 0, 0, 0, -3, 0, 0, 0))


@pytest.fixture
def biquartic_roots():
    fourth = 2 ** 0.25
    return [1, -1, 1j, -1j, fourth, -fourth, 1j * fourth, -1j * fourth]


@pytest.fixture
def nonic_cubic():
    """z^9 - 7z^3 + 6, whose cube y = z^3 solves y^3 - 7y + 6 = 0."""
    return MonicPoly(9, (6, 0, 0, -7, 0, 0, 0, 0, 0))


@pytest.fixture
def nonic_cubic_roots():
    roots = []
    for y in (1.0, 2.0, -3.0):
        base = complex(y) ** (1.0 / 3.0)
        roots.extend(base * np.exp(2j * np.pi * k / 3) for k in range(3))
    return [complex(r) for r in roots]
