import numpy as np
import pytest

from bswitch.lib import switched

EXAMPLE1 = ([[-1.0, 1.0], [-1.0, -3.0]], [[0.01, 3.0], [-1.0, -4.0]])
EXAMPLE2 = ([[-1.0, 10.0], [-100.0, -1.0]], [[-1.0, 100.0], [-10.0, -1.0]])
BASIC = [[-1.0, 2.0], [-3.0, -4.0]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def example1():
    return switched.SwitchedSystem(tuple(switched.LinearSubsystem(a) for a in EXAMPLE1),
                                   switched.StateSign(10.0, 100), 'example1')


@pytest.fixture
def example2():
    return switched.SwitchedSystem(tuple(switched.LinearSubsystem(a) for a in EXAMPLE2),
                                   switched.StateSign(10.0, 100, active_when='negative'), 'example2')


def random_poly_terms(rng, n, max_degree=4, count=6, integer=False):
    terms = dict()
    for _ in range(count):
        while True:
            exponents = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=n))
            if sum(exponents) <= max_degree:
                break
        coefficient = float(rng.integers(-5, 6)) if integer else float(rng.uniform(-1.0, 1.0))
        terms[exponents] = coefficient
    return terms
