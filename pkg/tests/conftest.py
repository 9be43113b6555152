import pytest

from satotate_lab import curves as cv


@pytest.fixture(scope="session")
def cache_25():
    """The desk-scale family A = B = 25 over the dyadic window at x = 2000."""
    return cv.sweep(25, 25, cv.prime_window(2000))


@pytest.fixture(scope="session")
def cache_small():
    return cv.sweep(3, 3, cv.prime_window(200))
