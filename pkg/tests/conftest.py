import numpy as np
import pytest

from stokes2 import ProblemParams, build_series, solve_fredholm


@pytest.fixture(scope="session")
def p_base():
    return ProblemParams(omega1=1.0, q=0.5)


@pytest.fixture(scope="session")
def series_base(p_base):
    """Order-8 series at omega1 = 1, q = 0.5 (all orders kept)."""
    return build_series(p_base, 8, series_tol=0.0)


@pytest.fixture(scope="session")
def nystrom_base(p_base):
    return solve_fredholm(p_base)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
