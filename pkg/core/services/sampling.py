"""
    Seeded random states.

    PSD samples use the Ginibre construction G·G† (full rank with
    probability one); probability vectors are Dirichlet(1, …, 1).  Every
    function takes a ``numpy.random.Generator`` so callers decide how seeds
    are derived.
"""
from typing import Optional

import numpy as np

from api.models.cq_state import CQState


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def ginibre(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    cols = dim if rank is None else rank
    return rng.standard_normal((dim, cols)) + 1j * rng.standard_normal((dim, cols))


def random_psd(dim: int, rng: np.random.Generator, rank: Optional[int] = None,
               scale: float = 1.0) -> np.ndarray:
    """G·G† normalised to trace ``scale``."""
    g = ginibre(dim, rng, rank)
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return scale * m / np.trace(m).real


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    return random_psd(dim, rng, rank)


def random_pure(dim: int, rng: np.random.Generator) -> np.ndarray:
    return random_psd(dim, rng, rank=1)


def random_probability(size: int, rng: np.random.Generator) -> np.ndarray:
    return rng.dirichlet(np.ones(size))


def random_cq_state(alphabet_size: int, dim_e: int, rng: np.random.Generator) -> CQState:
    p = random_probability(alphabet_size, rng)
    return CQState(p, [random_density(dim_e, rng) for _ in range(alphabet_size)])
