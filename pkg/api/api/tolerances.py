"""
    Numeric tolerances and size limits.

    Every threshold used by the operator types and the services lives here
    as a module-level constant; ``Tolerances`` and ``Limits`` bundle them
    into records that ``PlatformConfig`` can carry and tests can pin.
"""
from dataclasses import dataclass

HERMITIAN_TOL = 1e-10       # relative to the largest absolute entry
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
PROBABILITY_TOL = 1e-10
SPECTRAL_TOL = 1e-9
SUPPORT_CUTOFF = 1e-12      # λ < cutoff · max(|λ_max|, 1) counts as 0
SUPPORT_CHECK_TOL = 1e-8
KRAUS_TOL = 1e-9
ALPHA_ONE_BAND = 1e-6       # |α − 1| below this dispatches to the von Neumann limit

EXPLICIT_SIZE_LIMIT = 4096
MINIMIZE_DIM_LIMIT = 8
ENUMERATE_U_LIMIT = 12
UNIVERSALITY_U_LIMIT = 6
MAX_U = 16
WIRETAP_ENUMERATION_LIMIT = 2 ** 20


@dataclass(frozen=True)
class Tolerances:
    """
    Comparison tolerances for operator invariants and spectral calculus.

    Attributes:
        hermitian:     Max |A − A†| relative to max |A_ij|.
        psd:           Most negative eigenvalue still accepted as PSD.
        trace:         Allowed deviation of a density operator's trace from 1.
        probability:   Allowed deviation of a probability vector's sum from 1.
        spectral:      Reconstruction / orthonormality tolerance of eigh.
        support_cutoff: Relative eigenvalue cutoff defining the support.
        support_check: Projector-comparison tolerance for support inclusion.
        kraus:         Completeness tolerance Σ K†K = 1.
        alpha_one_band: Half-width of the α ≈ 1 dispatch band.
    """
    hermitian: float = HERMITIAN_TOL
    psd: float = PSD_TOL
    trace: float = TRACE_TOL
    probability: float = PROBABILITY_TOL
    spectral: float = SPECTRAL_TOL
    support_cutoff: float = SUPPORT_CUTOFF
    support_check: float = SUPPORT_CHECK_TOL
    kraus: float = KRAUS_TOL
    alpha_one_band: float = ALPHA_ONE_BAND


@dataclass(frozen=True)
class Limits:
    """
    Size limits for explicit constructions and exhaustive enumerations.

    Attributes:
        explicit_size:   Max |X|^n · d_E^n for iid_extend.
        minimize_dim:    Max dimension handed to the σ_E minimizer.
        enumerate_u:     Max u for exhaustive hash-family enumeration.
        universality_u:  Max u for the exact pair-collision table.
        max_u:           Max supported field degree.
        wiretap_enumeration: Max |X|^{ML} · 2^{2u} for exact wiretap d₁.
    """
    explicit_size: int = EXPLICIT_SIZE_LIMIT
    minimize_dim: int = MINIMIZE_DIM_LIMIT
    enumerate_u: int = ENUMERATE_U_LIMIT
    universality_u: int = UNIVERSALITY_U_LIMIT
    max_u: int = MAX_U
    wiretap_enumeration: int = WIRETAP_ENUMERATION_LIMIT


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_LIMITS = Limits()
