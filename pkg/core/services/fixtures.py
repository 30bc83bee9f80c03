"""
    Named states and wiretap channels shipped with the toolkit.

    Every builder returns a fresh object; ``FIXTURES`` / ``WIRETAP_FIXTURES``
    map the CLI names (``--fixture NAME``) to them.
"""
from typing import Callable, Dict

import numpy as np

from api.exceptions import ValidationError
from api.models.cq_state import CQState, WiretapChannel

_KET0 = np.diag([1.0, 0.0]).astype(complex)
_KET1 = np.diag([0.0, 1.0]).astype(complex)
_TRIVIAL = np.ones((1, 1), dtype=complex)

# Pinned qubit-E ensemble (exact decimal entries).
_QUBIT_P = (0.35, 0.65)
_QUBIT_RHOS = (
    np.array([[0.7, 0.2 + 0.1j], [0.2 - 0.1j, 0.3]]),
    np.array([[0.25, -0.1 + 0.15j], [-0.1 - 0.15j, 0.75]]),
)


def uniform_bit() -> CQState:
    """p = (½, ½), no side information."""
    return CQState([0.5, 0.5], [_TRIVIAL, _TRIVIAL])


def correlated_bit() -> CQState:
    """Eve holds a perfect copy: ρ_x = |x⟩⟨x|."""
    return CQState([0.5, 0.5], [_KET0, _KET1])


def product_uniform_2bit() -> CQState:
    """Uniform over four symbols, no side information."""
    return CQState([0.25] * 4, [_TRIVIAL] * 4)


def classical_quarter() -> CQState:
    """p = (¼, ¾), no side information."""
    return CQState([0.25, 0.75], [_TRIVIAL, _TRIVIAL])


def random_qubit_e() -> CQState:
    return CQState(_QUBIT_P, _QUBIT_RHOS)


def orthogonal_eve_channel() -> WiretapChannel:
    """σ_BE^x = |x⟩⟨x| ⊗ |x⟩⟨x|: Eve learns x."""
    return WiretapChannel([np.kron(_KET0, _KET0), np.kron(_KET1, _KET1)], 2, 2)


def leakage_free_channel() -> WiretapChannel:
    """σ_BE^x = |x⟩⟨x| ⊗ 1/2: Eve's output is independent of x."""
    half = np.eye(2, dtype=complex) / 2
    return WiretapChannel([np.kron(_KET0, half), np.kron(_KET1, half)], 2, 2)


FIXTURES: Dict[str, Callable[[], CQState]] = {
    "uniform-bit": uniform_bit,
    "correlated-bit": correlated_bit,
    "product-uniform-2bit": product_uniform_2bit,
    "classical-quarter": classical_quarter,
    "random-qubit-e": random_qubit_e,
}

WIRETAP_FIXTURES: Dict[str, Callable[[], WiretapChannel]] = {
    "orthogonal-eve": orthogonal_eve_channel,
    "leakage-free": leakage_free_channel,
}


def fixture_state(name: str) -> CQState:
    """
    Raises:
        ValidationError: If ``name`` is not a bundled state.
    """
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ValidationError(f"Unknown fixture '{name}'. Expected one of: {', '.join(FIXTURES)}.")


def fixture_channel(name: str) -> WiretapChannel:
    try:
        return WIRETAP_FIXTURES[name]()
    except KeyError:
        raise ValidationError(
            f"Unknown wiretap fixture '{name}'. Expected one of: {', '.join(WIRETAP_FIXTURES)}."
        )
