import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from twofluid.state import GasParams, fluid_cons

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

GAMMA = 5.0 / 3.0


def random_prims(rng, n, umax=2.0):
    """(5, n) admissible primitive states (rho, u, v, w, p)."""
    W = np.empty((5, n))
    W[0] = rng.uniform(0.1, 5.0, n)
    W[1:4] = rng.uniform(-umax, umax, (3, n))
    W[4] = rng.uniform(0.1, 5.0, n)
    return W


def random_fluid(rng, n, gamma=GAMMA, umax=2.0):
    return fluid_cons(random_prims(rng, n, umax), gamma)


def random_state(rng, n, gamma=GAMMA):
    """(18, n) admissible conserved states with O(1) fields."""
    U = np.zeros((18, n))
    U[0:5] = random_fluid(rng, n, gamma)
    U[5:10] = random_fluid(rng, n, gamma)
    U[10:16] = rng.uniform(-1.0, 1.0, (6, n))
    return U


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def gas():
    return GasParams(GAMMA, GAMMA, r_I=2.0, r_E=-3.0, c=2.0, eps0=0.25)
