"""
    Rényi divergences and the derived conditional entropies / mutual informations.

    All quantities are in nats.  c-q quantities are evaluated blockwise:
    with ρ_XE = ⊕_x p(x)ρ_x, the Petz-type quantities reduce to

        H↓_α(X|E) = −(1/(α−1)) log Σ_x p(x)^α Tr[ρ_x^α ρ_E^{1−α}]
        I↓_α(X:E) =  (1/(α−1)) log Σ_x p(x)   Tr[ρ_x^α ρ_E^{1−α}]

    and the star quantities are minimisations over σ_E handled by
    ``services.minimizer``.  Orders within ``ALPHA_ONE_BAND`` of 1 use the
    von Neumann limits.  Order 0 of the Petz quantities is available
    internally (support projectors), which the exponent envelopes need at
    the α = 1/2 end of the 2 − 1/α reparametrisation.
"""
import logging
from typing import Any, Optional, Tuple

import numpy as np

from api.exceptions import DomainError, ValidationError
from api.linalg import from_spectrum, mat_log_support, psd_spectrum, spectral_power, support_contained
from api.models.cq_state import CQState
from api.models.operator import DensityOperator, HermitianOperator
from api.tolerances import ALPHA_ONE_BAND
from api.types import DivergenceKind, EntropyKind, MutualInfoKind, TypeValidator

from privamp.config import OptimizerConfig

from .minimizer import MinimizeResult, SandwichedCQObjective, minimize_sigma

logger = logging.getLogger(__name__)


def near_one(alpha: float) -> bool:
    return abs(alpha - 1.0) < ALPHA_ONE_BAND


def _positive(value: float, name: str = "α") -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value}.")
    return value


def _density(rho: Any) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityOperator) else DensityOperator(rho).matrix


def _psd(sigma: Any) -> np.ndarray:
    m = sigma.matrix if isinstance(sigma, HermitianOperator) else HermitianOperator(sigma).matrix
    psd_spectrum(m, "σ")
    return m


def _check_support(rho: np.ndarray, sigma: np.ndarray) -> None:
    if not support_contained(rho, sigma):
        raise DomainError("Support of ρ is not contained in the support of σ.")


def _entropy_of_spectrum(w: np.ndarray) -> float:
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


def von_neumann_entropy(rho: Any) -> float:
    w, _ = psd_spectrum(np.asarray(rho.matrix if isinstance(rho, HermitianOperator) else rho,
                                   dtype=complex))
    return _entropy_of_spectrum(w)


# ── Divergences ──────────────────────────────────────────────────

def relative_entropy(rho: Any, sigma: Any) -> float:
    """D(ρ‖σ) = Tr[ρ(log ρ − log σ)], logarithms on the supports."""
    r, s = _density(rho), _psd(sigma)
    _check_support(r, s)
    return float(np.real(np.trace(r @ (mat_log_support(r) - mat_log_support(s)))))


def _log_ratio_moments(rho: np.ndarray, sigma: np.ndarray) -> Tuple[float, float]:
    ratio = mat_log_support(rho) - mat_log_support(sigma)
    first = float(np.real(np.trace(rho @ ratio)))
    second = float(np.real(np.trace(rho @ ratio @ ratio)))
    return first, second


def relative_entropy_variance(rho: Any, sigma: Any) -> float:
    """V(ρ‖σ) = Tr[ρ(log ρ − log σ)²] − D(ρ‖σ)² (centred)."""
    r, s = _density(rho), _psd(sigma)
    _check_support(r, s)
    first, second = _log_ratio_moments(r, s)
    return max(second - first ** 2, 0.0)


def relative_entropy_second_moment(rho: Any, sigma: Any) -> float:
    """Tr[ρ(log ρ − log σ)²] without centring; diagnostic only."""
    r, s = _density(rho), _psd(sigma)
    _check_support(r, s)
    return _log_ratio_moments(r, s)[1]


def _petz_trace(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    w, u = psd_spectrum(rho, "ρ")
    m, v = psd_spectrum(sigma, "σ")
    return float(np.real(np.trace(spectral_power(w, u, alpha) @ spectral_power(m, v, 1 - alpha))))


def _sandwiched_trace(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    m, v = psd_spectrum(sigma, "σ")
    side = spectral_power(m, v, (1 - alpha) / (2 * alpha))
    inner = side @ rho @ side
    w, _ = psd_spectrum((inner + inner.conj().T) / 2, "sandwich")
    return float(np.sum(w[w > 0] ** alpha))


def divergence(kind: DivergenceKind, rho: Any, sigma: Any, alpha: float) -> float:
    """
    Petz or sandwiched Rényi divergence of order α.

    Raises:
        ValidationError: If α ≤ 0 or the inputs are malformed.
        DomainError:     If supp ρ ⊄ supp σ.
    """
    kind = TypeValidator.parse_enum(kind, DivergenceKind, "divergence kind")
    alpha = _positive(alpha)
    if near_one(alpha):
        return relative_entropy(rho, sigma)
    r, s = _density(rho), _psd(sigma)
    _check_support(r, s)
    if kind is DivergenceKind.PETZ:
        q = _petz_trace(r, s, alpha)
    else:
        q = _sandwiched_trace(r, s, alpha)
    return float(np.log(q) / (alpha - 1))


# ── c-q block machinery ──────────────────────────────────────────

class CQSpectra:
    """
    Cached eigen-decompositions of ρ_x (for p(x) > 0) and of ρ_E, giving
    T_x(β) = Tr[ρ_x^β ρ_E^{1−β}] for any β ∈ [0, ∞) in O(|X| d²).
    """

    def __init__(self, state: CQState):
        mask = state.p > 0
        self.p = state.p[mask]
        rhos = state.rhos[mask]
        self.w = np.empty(rhos.shape[:2])
        vecs = np.empty(rhos.shape, dtype=complex)
        for k, r in enumerate(rhos):
            self.w[k], vecs[k] = psd_spectrum(r, "ρ_x")
        self.mu, v = psd_spectrum(state.blocks.sum(axis=0), "ρ_E")
        self.overlaps = np.abs(np.einsum("kai,aj->kij", vecs.conj(), v)) ** 2

    @staticmethod
    def _pow(x: np.ndarray, e: float) -> np.ndarray:
        out = np.zeros_like(x)
        mask = x > 0
        out[mask] = 1.0 if e == 0 else x[mask] ** e
        return out

    def traces(self, beta: float) -> np.ndarray:
        a = self._pow(self.w, beta)
        b = self._pow(self.mu, 1 - beta)
        return np.einsum("ki,kij,j->k", a, self.overlaps, b)

    def conditional_vn(self) -> float:
        """H(X|E) = H(p) + Σ_x p(x) H(ρ_x) − H(ρ_E)."""
        h_xe = _entropy_of_spectrum(self.p) + sum(
            pk * _entropy_of_spectrum(wk) for pk, wk in zip(self.p, self.w))
        return h_xe - _entropy_of_spectrum(self.mu)

    def mutual_vn(self) -> float:
        """I(X:E) = H(ρ_E) − Σ_x p(x) H(ρ_x)."""
        return _entropy_of_spectrum(self.mu) - sum(
            pk * _entropy_of_spectrum(wk) for pk, wk in zip(self.p, self.w))


def h_down(state: CQState, beta: float, spectra: Optional[CQSpectra] = None) -> float:
    """H↓_β(X|E) for β ≥ 0 (β = 0 uses support projectors)."""
    spectra = spectra or CQSpectra(state)
    if near_one(beta):
        return spectra.conditional_vn()
    total = float(np.sum(CQSpectra._pow(spectra.p, beta) * spectra.traces(beta)))
    return float(-np.log(total) / (beta - 1))


def i_down(state: CQState, beta: float, spectra: Optional[CQSpectra] = None) -> float:
    """I↓_β(X:E) for β ≥ 0."""
    spectra = spectra or CQSpectra(state)
    if near_one(beta):
        return spectra.mutual_vn()
    total = float(np.sum(spectra.p * spectra.traces(beta)))
    return float(np.log(total) / (beta - 1))


def _star_alpha(alpha: float) -> float:
    alpha = _positive(alpha)
    if alpha <= 0.5:
        raise ValidationError(f"Sandwiched quantities need α > 1/2, got {alpha}.")
    return alpha


def h_star_result(state: CQState, alpha: float, config: Optional[OptimizerConfig] = None,
                  initial: Optional[np.ndarray] = None) -> Tuple[float, MinimizeResult]:
    """
    H*_α(X|E) = −min_τ D*_α(ρ_XE ‖ 1 ⊗ τ), with the minimiser.

    Raises:
        ConvergenceError: From the minimiser.
    """
    alpha = _star_alpha(alpha)
    rho_e = state.blocks.sum(axis=0)
    if near_one(alpha):
        value = CQSpectra(state).conditional_vn()
        return value, MinimizeResult(rho_e, -value, 0.0, True, 0, 0)
    objective = SandwichedCQObjective(state.blocks, alpha, reference=rho_e)
    result = minimize_sigma(objective, config, initial=initial)
    return -result.value, result


def i_star_result(state: CQState, alpha: float, config: Optional[OptimizerConfig] = None,
                  initial: Optional[np.ndarray] = None) -> Tuple[float, MinimizeResult]:
    """I*_α(X:E) = min_τ D*_α(ρ_XE ‖ ρ_X ⊗ τ), with the minimiser."""
    alpha = _star_alpha(alpha)
    rho_e = state.blocks.sum(axis=0)
    if near_one(alpha):
        value = CQSpectra(state).mutual_vn()
        return value, MinimizeResult(rho_e, value, 0.0, True, 0, 0)
    blocks = (state.p ** (1.0 / alpha))[:, None, None] * state.rhos
    objective = SandwichedCQObjective(blocks, alpha, reference=rho_e)
    result = minimize_sigma(objective, config, initial=initial)
    return result.value, result


def h_down_star(state: CQState, alpha: float) -> float:
    """H↓*_α(X|E) = −D*_α(ρ_XE ‖ 1 ⊗ ρ_E)."""
    alpha = _star_alpha(alpha)
    if near_one(alpha):
        return CQSpectra(state).conditional_vn()
    rho_e = state.blocks.sum(axis=0)
    return -SandwichedCQObjective(state.blocks, alpha).value(rho_e)


def conditional_entropy(kind: EntropyKind, state: CQState, alpha: float,
                        config: Optional[OptimizerConfig] = None) -> float:
    """
    H↓_α, H*_α or H↓*_α of X given E.

    Raises:
        ValidationError:  If α is outside the kind's range.
        ConvergenceError: If the star minimisation does not converge.
    """
    kind = TypeValidator.parse_enum(kind, EntropyKind, "entropy kind")
    if kind is EntropyKind.DOWN:
        return h_down(state, _positive(alpha))
    if kind is EntropyKind.STAR:
        return h_star_result(state, alpha, config)[0]
    return h_down_star(state, alpha)


def mutual_information(kind: MutualInfoKind, state: CQState, alpha: float,
                       config: Optional[OptimizerConfig] = None) -> float:
    kind = TypeValidator.parse_enum(kind, MutualInfoKind, "mutual information kind")
    if kind is MutualInfoKind.DOWN:
        return i_down(state, _positive(alpha))
    return i_star_result(state, alpha, config)[0]


def cq_sandwiched_reduction(state: CQState, tau: Any, alpha: float) -> float:
    """
    (1/(α−1)) log Σ_x p(x) e^{(α−1) D*_α(ρ_x ‖ τ)} = D*_α(ρ_XE ‖ ρ_X ⊗ τ).

    Raises:
        DomainError: If some ρ_x with p(x) > 0 is not supported inside τ.
    """
    alpha = _star_alpha(alpha)
    t = _density(tau)
    support = state.p > 0
    for r in state.rhos[support]:
        _check_support(r, t)
    if near_one(alpha):
        return float(sum(pk * relative_entropy(r, t) for pk, r in zip(state.p[support],
                                                                      state.rhos[support])))
    total = sum(pk * _sandwiched_trace(r, t, alpha)
                for pk, r in zip(state.p[support], state.rhos[support]))
    return float(np.log(total) / (alpha - 1))


# ── Variances ────────────────────────────────────────────────────

def _block_variance(state: CQState, conditional: bool) -> float:
    rho_e = state.blocks.sum(axis=0)
    log_e = mat_log_support(rho_e)
    first = second = 0.0
    for pk, r in zip(state.p, state.rhos):
        if pk <= 0:
            continue
        ratio = mat_log_support(r) - log_e
        if conditional:
            ratio = ratio + np.log(pk) * np.eye(r.shape[0])
        first += pk * float(np.real(np.trace(r @ ratio)))
        second += pk * float(np.real(np.trace(r @ ratio @ ratio)))
    return max(second - first ** 2, 0.0)


def cond_var(state: CQState) -> float:
    """V(X|E) = V(ρ_XE ‖ 1_X ⊗ ρ_E)."""
    return _block_variance(state, conditional=True)


def mi_var(state: CQState) -> float:
    """V(X:E) = V(ρ_XE ‖ ρ_X ⊗ ρ_E)."""
    return _block_variance(state, conditional=False)


def conditional_vn_entropy(state: CQState) -> float:
    return CQSpectra(state).conditional_vn()


def mutual_vn_information(state: CQState) -> float:
    return CQSpectra(state).mutual_vn()
