# tests/conftest.py
"""
Shared test fixtures.
Bundled c-q states (trivial, perfectly correlated and qubit side
information), the two bundled wiretap channels, a seeded generator and
small optimizer / exponent settings that keep the suite fast.
"""
import numpy as np
import pytest

from api.models.cq_state import CQState
from privamp.config import ExponentConfig, OptimizerConfig, PlatformConfig
from services.fixtures import (
    classical_quarter,
    correlated_bit,
    leakage_free_channel,
    orthogonal_eve_channel,
    product_uniform_2bit,
    random_qubit_e,
    uniform_bit,
)

# ── Hand-written states ──────────────────────────────────────────
# (p, conditional states) pairs used by several modules; E is a qubit.
_KET_PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
_KET_MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
_MIXED = np.eye(2, dtype=complex) / 2

_STATES = {
    "bb84-like": ([0.5, 0.5], [_KET_PLUS, _KET_MINUS]),
    "no-leak-qubit": ([0.3, 0.7], [_MIXED, _MIXED]),
    "three-symbol": ([0.2, 0.3, 0.5],
                     [np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), _KET_PLUS]),
}


def build_state(name: str) -> CQState:
    p, rhos = _STATES[name]
    return CQState(p, [np.asarray(r, dtype=complex) for r in rhos])


# ── State fixtures ───────────────────────────────────────────────

@pytest.fixture
def uniform():
    return uniform_bit()


@pytest.fixture
def correlated():
    return correlated_bit()


@pytest.fixture
def product_uniform():
    return product_uniform_2bit()


@pytest.fixture
def quarter():
    return classical_quarter()


@pytest.fixture
def qubit_state():
    return random_qubit_e()


@pytest.fixture
def three_symbol():
    return build_state("three-symbol")


@pytest.fixture
def no_leak():
    return build_state("no-leak-qubit")


# ── Channels ─────────────────────────────────────────────────────

@pytest.fixture
def orthogonal_eve():
    return orthogonal_eve_channel()


@pytest.fixture
def leakage_free():
    return leakage_free_channel()


# ── Settings ─────────────────────────────────────────────────────

@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def optimizer():
    """Default tolerance, a larger iteration budget and fewer random starts."""
    return OptimizerConfig(tol=1e-7, max_iters=4000, starts=3)


@pytest.fixture
def coarse_exponents():
    """A shorter α-grid; Brent refinement still runs on the best cell."""
    return ExponentConfig(grid_points=64, alpha_tol=1e-9)


@pytest.fixture
def fast_config():
    return PlatformConfig(exponents=ExponentConfig(grid_points=64),
                          optimizer=OptimizerConfig(tol=1e-7, max_iters=4000, starts=3))
