"""
    Minimisation over density operators.

    Design Pattern: Strategy
    ────────────────────────
    ``minimize_sigma`` works against the ``SigmaObjective`` interface
    (value + gradient on the state space); the only concrete objective used
    by the entropic quantities is ``SandwichedCQObjective``

        τ ↦ (1/(α−1)) log Σ_x Tr[(τ^s B_x τ^s)^α],   s = (1−α)/(2α),

    which is D*_α(ρ_XE ‖ 1 ⊗ τ) for B_x = p(x)ρ_x and D*_α(ρ_XE ‖ ρ_X ⊗ τ)
    for B_x = p(x)^{1/α}ρ_x.

    Algorithm
    ─────────
    Matrix exponentiated gradient (mirror descent with the von Neumann
    entropy as mirror map): log τ ← log τ − η ∇D, renormalised.  Steps
    are accepted under an Armijo test and η adapts (×2 on success, ÷2 on
    rejection).  A start has converged when the stationarity residual
    sqrt(Tr[τ(∇D − Tr[τ∇D])²]) is at most ``tol``.  Starts: the reference
    state (usually ρ_E), 1/d, and seeded Ginibre states.

    Near the optimum the Armijo test drowns in rounding (the value carries
    a 1/(α−1) factor), so once the residual is below 1e-4, and again when
    descent stalls, the iterate is polished: Levenberg-Marquardt solves
    ∇D − Tr[τ∇D]·1 = 0 in the coordinates τ ∝ exp(log τ₀ + H).  Only
    gradients enter the polish.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import root

from api.exceptions import ConvergenceError, ValidationError
from api.linalg import from_spectrum, psd_spectrum, spectral_power, support_threshold
from api.tolerances import MINIMIZE_DIM_LIMIT

from privamp.config import OptimizerConfig

from .sampling import random_density, rng_for

logger = logging.getLogger(__name__)

_EIG_FLOOR = 1e-15
_ARMIJO = 1e-4
_MAX_STEP = 1e6
_MIN_STEP = 1e-12
_INTERIOR_MIX = 1e-6
_POLISH_FROM = 1e-4


@dataclass
class MinimizeResult:
    """
    Attributes:
        minimizer:  The returned density matrix.
        value:      Objective at ``minimizer``.
        residual:   Stationarity residual at ``minimizer``.
        converged:  Whether ``residual ≤ tol``.
        iterations: Iterations spent on the returned start.
        starts:     Number of starts tried.
    """
    minimizer: np.ndarray
    value: float
    residual: float
    converged: bool
    iterations: int
    starts: int


# ── Objectives ───────────────────────────────────────────────────

class SigmaObjective(ABC):
    """A differentiable function on d × d density matrices."""

    @property
    @abstractmethod
    def dim(self) -> int:
        ...

    @property
    def reference(self) -> Optional[np.ndarray]:
        """Preferred first start, if the objective has a natural one."""
        return None

    @abstractmethod
    def value(self, tau: np.ndarray) -> float:
        ...

    @abstractmethod
    def value_and_gradient(self, tau: np.ndarray) -> Tuple[float, np.ndarray]:
        """Value and Hermitian gradient G with dF = Tr[G·dτ] (τ full rank)."""
        ...


def power_divided_differences(w: np.ndarray, t: float) -> np.ndarray:
    """
    First divided differences of λ ↦ λ^t at positive eigenvalues ``w``.

    Off-diagonal entries use λ_j^t · expm1(t log(λ_i/λ_j)) / (λ_i − λ_j),
    which stays accurate for nearly equal eigenvalues.
    """
    li, lj = w[:, None], w[None, :]
    diff = li - lj
    close = np.abs(diff) <= 1e-10 * np.maximum(li, lj)
    with np.errstate(divide="ignore", invalid="ignore"):
        off = lj ** t * np.expm1(t * np.log(li / lj)) / diff
    mid = (li + lj) / 2
    return np.where(close, t * mid ** (t - 1), off)


class SandwichedCQObjective(SigmaObjective):
    """
    τ ↦ (1/(α−1)) log Σ_x Tr[(B_x^{1/2} τ^t B_x^{1/2})^α] with t = (1−α)/α.

    Args:
        blocks:    (k, d, d) PSD blocks B_x; zero blocks are dropped.
        alpha:     Order, α > 1/2, α ≠ 1.
        reference: Optional natural first start (normalised internally).
    """

    def __init__(self, blocks: np.ndarray, alpha: float, reference: Optional[np.ndarray] = None):
        if not alpha > 0.5 or alpha == 1:
            raise ValidationError(f"Sandwiched objective needs α > 1/2, α ≠ 1; got {alpha}.")
        blocks = np.asarray(blocks, dtype=complex)
        traces = np.real(np.trace(blocks, axis1=1, axis2=2))
        blocks = blocks[traces > 0]
        if blocks.shape[0] == 0:
            raise ValidationError("Objective needs at least one non-zero block.")
        roots = []
        for b in blocks:
            w, u = psd_spectrum(b, "block")
            roots.append(spectral_power(w, u, 0.5))
        self._roots = np.stack(roots)
        self._alpha = float(alpha)
        self._t = (1.0 - alpha) / alpha
        self._reference = None if reference is None else np.asarray(reference, dtype=complex)

    @property
    def dim(self) -> int:
        return self._roots.shape[1]

    @property
    def alpha(self) -> float:
        return self._alpha

    @property
    def reference(self) -> Optional[np.ndarray]:
        return self._reference

    def _trace_sum(self, tau_t: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
        m = self._roots @ tau_t @ self._roots
        m = (m + np.conj(np.swapaxes(m, 1, 2))) / 2
        mw, mv = np.linalg.eigh(m)
        for k in range(mw.shape[0]):
            mw[k] = np.where(mw[k] < support_threshold(mw[k]), 0.0, mw[k])
        return float(np.sum(mw ** self._alpha)), mw, mv

    def value(self, tau: np.ndarray) -> float:
        w, u = psd_spectrum(np.asarray(tau, dtype=complex), "τ")
        total, _, _ = self._trace_sum(spectral_power(w, u, self._t))
        return float(np.log(total) / (self._alpha - 1))

    def value_and_gradient(self, tau: np.ndarray) -> Tuple[float, np.ndarray]:
        w, u = np.linalg.eigh(tau)
        w = np.maximum(w, _EIG_FLOOR)
        total, mw, mv = self._trace_sum(from_spectrum(w ** self._t, u))

        # Y = Σ_x B^{1/2} (B^{1/2} τ^t B^{1/2})^{α−1} B^{1/2}, powers on the support
        with np.errstate(divide="ignore"):
            powered = np.where(mw > 0, mw, 1.0) ** (self._alpha - 1)
        powered = np.where(mw > 0, powered, 0.0)
        inner = np.einsum("kij,kj,klj->kil", mv, powered, mv.conj())
        y = np.einsum("kab,kbc,kcd->ad", self._roots, inner, self._roots)

        gamma = power_divided_differences(w, self._t)
        grad_g = self._alpha * u @ (gamma * (u.conj().T @ y @ u)) @ u.conj().T
        grad = grad_g / ((self._alpha - 1) * total)
        grad = (grad + grad.conj().T) / 2
        return float(np.log(total) / (self._alpha - 1)), grad


# ── Mirror descent ───────────────────────────────────────────────

def stationarity_residual(tau: np.ndarray, grad: np.ndarray) -> float:
    mean = float(np.real(np.trace(tau @ grad)))
    centred = grad - mean * np.eye(grad.shape[0])
    second = float(np.real(np.trace(tau @ centred @ centred)))
    return float(np.sqrt(max(second, 0.0)))


def _log_state(tau: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(tau)
    return from_spectrum(np.log(np.maximum(w, _EIG_FLOOR)), u)


def _exp_state(h: np.ndarray) -> np.ndarray:
    """exp(h) / Tr exp(h), eigenvalues floored."""
    h = (h + h.conj().T) / 2
    hw, hu = np.linalg.eigh(h)
    ew = np.exp(hw - hw.max())
    ew = np.maximum(ew / ew.sum(), _EIG_FLOOR)
    out = from_spectrum(ew / ew.sum(), hu)
    return (out + out.conj().T) / 2


def _exp_step(tau: np.ndarray, grad: np.ndarray, eta: float) -> np.ndarray:
    return _exp_state(_log_state(tau) - eta * grad)


def hermitian_basis(d: int) -> np.ndarray:
    """(d², d, d) basis of Hermitian matrices, orthonormal under Tr[AB]."""
    basis = []
    s = 1 / np.sqrt(2)
    for j in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = s
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k], anti[k, j] = -1j * s, 1j * s
            basis.extend((sym, anti))
    return np.stack(basis)


def _polish(objective: SigmaObjective, tau: np.ndarray, val: float, grad: np.ndarray,
            residual: float) -> Tuple[np.ndarray, float, np.ndarray, float]:
    """
    Solve the stationarity condition from ``tau`` by Levenberg-Marquardt.

    The polished point replaces ``tau`` only if it lowers the residual
    without raising the value beyond rounding.
    """
    basis = hermitian_basis(objective.dim)
    log_tau = _log_state(tau)
    eye = np.eye(objective.dim)

    def state(x: np.ndarray) -> np.ndarray:
        return _exp_state(log_tau + np.einsum("k,kij->ij", x, basis))

    def centred_gradient(x: np.ndarray) -> np.ndarray:
        t = state(x)
        _, g = objective.value_and_gradient(t)
        c = g - np.real(np.trace(t @ g)) * eye
        return np.real(np.einsum("kij,ji->k", basis, c))

    sol = root(centred_gradient, np.zeros(len(basis)), method="lm",
               options={"xtol": 1e-14, "ftol": 1e-14})
    if not np.all(np.isfinite(sol.x)):
        return tau, val, grad, residual
    candidate = state(sol.x)
    cand_val, cand_grad = objective.value_and_gradient(candidate)
    cand_res = stationarity_residual(candidate, cand_grad)
    if cand_res < residual and cand_val <= val + 1e-10 * max(1.0, abs(val)):
        logger.debug("minimizer polish: residual %.3e -> %.3e in %d evaluations",
                     residual, cand_res, sol.nfev)
        return candidate, cand_val, cand_grad, cand_res
    return tau, val, grad, residual


def _interior(tau: np.ndarray) -> np.ndarray:
    d = tau.shape[0]
    m = np.asarray(tau, dtype=complex)
    m = m / np.trace(m).real
    return (1 - _INTERIOR_MIX) * m + _INTERIOR_MIX * np.eye(d) / d


def _descend(objective: SigmaObjective, start: np.ndarray,
             config: OptimizerConfig) -> MinimizeResult:
    tau = _interior(start)
    val, grad = objective.value_and_gradient(tau)
    eta = config.step
    residual = stationarity_residual(tau, grad)
    polished = False
    for it in range(1, config.max_iters + 1):
        if residual <= config.tol:
            return MinimizeResult(tau, val, residual, True, it - 1, 1)
        if not polished and residual <= _POLISH_FROM:
            polished = True
            tau, val, grad, residual = _polish(objective, tau, val, grad, residual)
            if residual <= config.tol:
                return MinimizeResult(tau, val, residual, True, it, 1)
        noise = 4 * np.finfo(float).eps * max(1.0, abs(val))
        while eta >= _MIN_STEP:
            candidate = _exp_step(tau, grad, eta)
            cand_val, cand_grad = objective.value_and_gradient(candidate)
            if cand_val <= val - _ARMIJO * eta * residual ** 2 + noise:
                tau, val, grad = candidate, cand_val, cand_grad
                eta = min(eta * 2, _MAX_STEP)
                break
            eta /= 2
        else:
            logger.debug("minimizer stalled at iteration %d (residual %.3e)", it, residual)
            break
        residual = stationarity_residual(tau, grad)
    if residual > config.tol:
        tau, val, grad, residual = _polish(objective, tau, val, grad, residual)
    converged = residual <= config.tol
    return MinimizeResult(tau, val, residual, converged, config.max_iters, 1)


def starting_points(objective: SigmaObjective, config: OptimizerConfig) -> List[np.ndarray]:
    """Reference state (if any), the maximally mixed state, then seeded Ginibre states."""
    d = objective.dim
    starts: List[np.ndarray] = []
    if objective.reference is not None:
        starts.append(objective.reference)
    starts.append(np.eye(d, dtype=complex) / d)
    rng = rng_for(config.seed)
    while len(starts) < max(config.starts, 2):
        starts.append(random_density(d, rng))
    return starts


def minimize_sigma(objective: SigmaObjective, config: Optional[OptimizerConfig] = None,
                   initial: Optional[np.ndarray] = None,
                   max_dim: int = MINIMIZE_DIM_LIMIT) -> MinimizeResult:
    """
    Minimise ``objective`` over density operators.

    A converged warm start (``initial``) is returned directly; otherwise all
    deterministic starts run and the best converged one is returned.

    Raises:
        ValidationError:  If the dimension exceeds ``max_dim``.
        ConvergenceError: If no start reaches the tolerance; carries the best
                          value, its residual and its minimizer.
    """
    config = config or OptimizerConfig()
    d = objective.dim
    if d > max_dim:
        raise ValidationError(f"Minimisation dimension {d} exceeds the limit {max_dim}.")
    if d == 1:
        one = np.ones((1, 1), dtype=complex)
        return MinimizeResult(one, objective.value(one), 0.0, True, 0, 0)

    if initial is not None:
        warm = _descend(objective, initial, config)
        if warm.converged:
            return warm

    results = [_descend(objective, s, config) for s in starting_points(objective, config)]
    tried = len(results) + (initial is not None)
    converged = [r for r in results if r.converged]
    if converged:
        best = min(converged, key=lambda r: r.value)
        best.starts = tried
        spread = max(r.value for r in converged) - best.value
        logger.debug("minimizer: %d/%d starts converged, value %.12g, spread %.3e",
                     len(converged), len(results), best.value, spread)
        return best

    best = min(results, key=lambda r: r.value)
    raise ConvergenceError(
        f"Minimiser did not converge in {config.max_iters} iterations "
        f"(best value {best.value:.12g}, residual {best.residual:.3e}).",
        best_value=best.value, residual=best.residual, minimizer=best.minimizer,
    )


def multi_start_values(objective: SigmaObjective,
                       config: Optional[OptimizerConfig] = None) -> List[MinimizeResult]:
    """Run every start independently (used to check multi-start agreement)."""
    config = config or OptimizerConfig()
    return [_descend(objective, s, config) for s in starting_points(objective, config)]


# ── Bloch-ball grid oracle (qubits) ──────────────────────────────

def bloch_state(r: Sequence[float]) -> np.ndarray:
    x, y, z = r
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)


def bloch_grid_search(value: Callable[[np.ndarray], float], resolution: float = 0.01,
                      radius: float = 0.999) -> Tuple[np.ndarray, float]:
    """
    Minimise a qubit objective over the Bloch ball on a hierarchical grid.

    The whole ball is scanned at step 0.1; each finer level (0.05, 0.02,
    then ``resolution``) rescans a window of ±3 coarse steps around the
    incumbent.
    """
    steps = [s for s in (0.1, 0.05, 0.02) if s > resolution] + [resolution]
    centre = np.zeros(3)
    half = 1.0
    best_r, best_v = centre, np.inf
    for step in steps:
        axis = np.arange(-half, half + step / 2, step)
        for dx in axis:
            for dy in axis:
                for dz in axis:
                    r = centre + np.array([dx, dy, dz])
                    if np.linalg.norm(r) > radius:
                        continue
                    v = value(bloch_state(r))
                    if v < best_v:
                        best_r, best_v = r, v
        centre = best_r
        half = 3 * step
    return bloch_state(best_r), float(best_v)
