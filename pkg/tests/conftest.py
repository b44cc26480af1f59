import numpy as np
import pytest

from wmfs import circle_curve, normalize, square_curve, star_curve, whitney_layers


@pytest.fixture(scope="session")
def star():
    return star_curve()


@pytest.fixture(scope="session")
def square():
    return square_curve()


@pytest.fixture(scope="session")
def circle():
    return circle_curve()


@pytest.fixture(scope="session")
def star_layer0_family(star):
    return normalize(whitney_layers(star, 0.3, 0, 0), star)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
