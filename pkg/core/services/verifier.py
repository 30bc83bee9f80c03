"""
    Numeric oracles for the inequalities and identities the bounds rest on.

    Design Pattern: Template Method
    ───────────────────────────────
    ``VerificationCheck.run`` fixes the skeleton

        enumerate cases → evaluate each (concurrently) → aggregate → side conditions

    and concrete checks supply the cases and the per-case violations.  A
    violation is the scale-free excess (LHS − RHS)/max(1, |RHS|); a check
    passes when the worst one is within its slack and no side condition
    (tightness evidence, exclusion budget) failed.

    Every random case draws from its own generator seeded by (seed, index),
    so reports do not depend on the worker count or completion order.
"""
import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, ClassVar, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from api.exceptions import ConvergenceError, ValidationError
from api.linalg import abs_op, mat_power, nonnegative_projector, trace_distance
from api.models.cq_state import CQState
from api.models.reports import CheckReport
from api.types import DivergenceKind

from privamp.config import OptimizerConfig, VerifierConfig

from .fixtures import FIXTURES
from .renyi import (
    CQSpectra, cond_var, divergence, h_down, h_star_result, i_down, i_star_result, mi_var,
)
from .sampling import random_density, random_probability, random_psd

logger = logging.getLogger(__name__)

CONCAVITY_ALPHAS = (1.3, 1.7, 2.0)
CONCAVITY_LAMBDAS = (0.25, 0.5, 0.75)
MONOTONE_ALPHAS = (0.6, 0.8, 1.2, 1.5, 2.0)
ADDITIVITY_ALPHAS = (0.75, 1.5, 2.0)
DERIVATIVE_STEPS = (1e-2, 1e-3)
LIMIT_OFFSET = 1e-4
LIMIT_TOL = 1e-3
DERIVATIVE_TOL = 1e-4


def relative_excess(lhs: float, rhs: float) -> float:
    """(LHS − RHS)/max(1, |RHS|); positive means LHS ≤ RHS is violated."""
    return (lhs - rhs) / max(1.0, abs(rhs))


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng((int(seed), int(index)))


class VerificationCheck(ABC):
    """
    Abstract base for one oracle.

    Class attributes:
        name:              Report name.
        slack:             Allowed worst violation.
        excludes_failures: Whether a non-convergent case is dropped (and
                           counted) instead of propagated.
        exclusion_budget:  Largest tolerated fraction of dropped cases.
    """
    name: ClassVar[str]
    slack: ClassVar[float]
    excludes_failures: ClassVar[bool] = False
    exclusion_budget: ClassVar[float] = 0.01

    def __init__(self, seed: int = 0, max_workers: Optional[int] = None):
        self._seed = int(seed)
        self._max_workers = max_workers

    def run(self) -> CheckReport:
        cases = list(self._cases())
        with ThreadPoolExecutor(max_workers=self._max_workers) as pool:
            outcomes = list(pool.map(self._guarded, cases))
        kept = [np.atleast_1d(np.asarray(o, dtype=float)) for o in outcomes if o is not None]
        excluded = len(outcomes) - len(kept)
        worst = max((float(np.max(o)) for o in kept), default=-math.inf)

        failures = self._side_failures(kept)
        if excluded:
            logger.warning("%s: %d of %d cases excluded for non-convergence",
                           self.name, excluded, len(outcomes))
            if excluded > self.exclusion_budget * len(outcomes):
                failures.append(f"excluded {excluded} of {len(outcomes)} cases "
                                f"(budget {self.exclusion_budget:.0%})")
        report = CheckReport(name=self.name, trials=len(outcomes), worst_violation=worst,
                             slack=self.slack, seed=self._seed, excluded=excluded,
                             failures=failures)
        logger.info("%s: %d cases, worst violation %.3e (slack %.1e): %s",
                    self.name, len(outcomes), worst, self.slack,
                    "pass" if report.passed else "FAIL")
        return report

    def _guarded(self, case: Any) -> Optional[Sequence[float]]:
        try:
            return self._evaluate(case)
        except ConvergenceError as e:
            if not self.excludes_failures:
                raise
            logger.debug("%s: case excluded (%s)", self.name, e)
            return None

    @abstractmethod
    def _cases(self) -> Iterable[Any]:
        ...

    @abstractmethod
    def _evaluate(self, case: Any) -> Sequence[float]:
        """Violations of every inequality checked on ``case``."""
        ...

    def _side_failures(self, outcomes: List[np.ndarray]) -> List[str]:
        return []


# ── Random-sample checks ─────────────────────────────────────────

def trace_inequality_sides(k: np.ndarray, l: np.ndarray, s: float) -> Tuple[float, float, float]:
    """
    (Tr[K(K+L)^{−1/2}L(K+L)^{−1/2}], Tr[(K+L−|K−L|)/2], Tr[K^{1−s}L^s]).
    """
    root = mat_power(k + l, -0.5)
    lhs = float(np.real(np.trace(k @ root @ l @ root)))
    middle = float(np.real(np.trace(k + l - abs_op(k - l)))) / 2
    rhs = float(np.real(np.trace(mat_power(k, 1 - s) @ mat_power(l, s))))
    return lhs, middle, rhs


class TraceInequalityCheck(VerificationCheck):
    name = "trace_inequality"
    slack = 1e-9

    def __init__(self, trials: int, dims: Sequence[int], seed: int = 0,
                 max_workers: Optional[int] = None):
        super().__init__(seed, max_workers)
        dims = [int(d) for d in dims]
        if not dims or any(d < 2 or d > 8 for d in dims):
            raise ValidationError(f"Trace-inequality dimensions must lie in [2, 8], got {dims}.")
        self._trials = int(trials)
        self._dims = dims

    def _cases(self):
        return range(self._trials)

    def _evaluate(self, index: int) -> Sequence[float]:
        rng = _trial_rng(self._seed, index)
        dim = self._dims[index % len(self._dims)]
        k = random_psd(dim, rng, scale=rng.uniform(0.1, 1.0))
        l = random_psd(dim, rng, scale=rng.uniform(0.1, 1.0))
        s = float(rng.uniform(0.01, 0.99))
        lhs, middle, rhs = trace_inequality_sides(k, l, s)
        return (relative_excess(lhs, middle), relative_excess(middle, rhs),
                relative_excess(lhs, rhs))

    def _side_failures(self, outcomes):
        # The reverse inequality must fail (LHS < RHS strictly) in ≥ 1 case per 100.
        strict = sum(1 for o in outcomes if o[2] < -self.slack)
        needed = max(1, len(outcomes) // 100)
        if strict < needed:
            return [f"only {strict} strict cases, expected ≥ {needed}"]
        return []


def _i_star_concave_term(state: CQState, alpha: float, optimizer: Optional[OptimizerConfig]) -> float:
    """e^{((α−1)/α) I*_α(X:E)}, minimised from ρ_E."""
    value, _ = i_star_result(state, alpha, optimizer, initial=state.blocks.sum(axis=0))
    return math.exp((alpha - 1) / alpha * value)


class ConcavityCheck(VerificationCheck):
    """Midpoint concavity of p ↦ e^{((α−1)/α) I*_α(X:E)} at fixed ρ_x."""
    name = "concavity"
    slack = 1e-7
    excludes_failures = True

    def __init__(self, trials: int, seed: int = 0, optimizer: Optional[OptimizerConfig] = None,
                 max_workers: Optional[int] = None):
        super().__init__(seed, max_workers)
        self._trials = int(trials)
        self._optimizer = optimizer

    def _cases(self):
        return range(self._trials)

    def _evaluate(self, index: int) -> Sequence[float]:
        rng = _trial_rng(self._seed, index)
        alpha = CONCAVITY_ALPHAS[index % len(CONCAVITY_ALPHAS)]
        lam = CONCAVITY_LAMBDAS[(index // len(CONCAVITY_ALPHAS)) % len(CONCAVITY_LAMBDAS)]
        size = int(rng.integers(2, 5))
        rhos = [random_density(2, rng) for _ in range(size)]
        p = random_probability(size, rng)
        q = random_probability(size, rng)
        mixed = lam * p + (1 - lam) * q
        f = lambda prior: _i_star_concave_term(CQState(prior, rhos), alpha, self._optimizer)
        chord = lam * f(p) + (1 - lam) * f(q)
        return (relative_excess(chord, f(mixed / mixed.sum())),)


class HelstromCheck(VerificationCheck):
    """Tr[Π₀(ρ₀−ρ₁)] = ½‖ρ₀−ρ₁‖₁ with Π₀ = {ρ₀ − ρ₁ ≥ 0}."""
    name = "helstrom_attainment"
    slack = 1e-9
    dim = 4

    def __init__(self, trials: int, seed: int = 0, max_workers: Optional[int] = None):
        super().__init__(seed, max_workers)
        self._trials = int(trials)

    def _cases(self):
        return range(self._trials)

    def _evaluate(self, index: int) -> Sequence[float]:
        rng = _trial_rng(self._seed, index)
        diff = random_density(self.dim, rng) - random_density(self.dim, rng)
        attained = float(np.real(np.trace(nonnegative_projector(diff) @ diff)))
        expected = trace_distance(diff, np.zeros_like(diff))
        return (abs(relative_excess(attained, expected)),)


# ── Per-state checks ─────────────────────────────────────────────

def _richardson(f: Callable[[float], float], x: float, steps: Sequence[float]) -> float:
    """Central differences at two steps combined to cancel the h² term."""
    h1, h2 = steps
    d1 = (f(x + h1) - f(x - h1)) / (2 * h1)
    d2 = (f(x + h2) - f(x - h2)) / (2 * h2)
    return (h1 ** 2 * d2 - h2 ** 2 * d1) / (h1 ** 2 - h2 ** 2)


def alpha_derivatives(state: CQState, optimizer: Optional[OptimizerConfig] = None,
                      steps: Sequence[float] = DERIVATIVE_STEPS) -> Dict[str, Tuple[float, float]]:
    """
    Numeric and analytic α-slopes at α = 1.

    Returns:
        {name: (numeric, analytic)} for ``h_star``, ``h_down``, ``i_star``, ``i_down``
        (the down quantities at order 2 − 1/α).

    Raises:
        ConvergenceError: From the star minimisations.
    """
    spectra = CQSpectra(state)
    v_cond, v_mut = cond_var(state), mi_var(state)
    curves = {
        "h_star": (lambda a: h_star_result(state, a, optimizer)[0], -v_cond / 2),
        "h_down": (lambda a: h_down(state, 2 - 1 / a, spectra), -v_cond / 2),
        "i_star": (lambda a: i_star_result(state, a, optimizer)[0], v_mut / 2),
        "i_down": (lambda a: i_down(state, 2 - 1 / a, spectra), v_mut / 2),
    }
    return {name: (_richardson(f, 1.0, steps), analytic) for name, (f, analytic) in curves.items()}


class _StateCheck(VerificationCheck):
    def __init__(self, state: CQState, label: str = "", optimizer: Optional[OptimizerConfig] = None,
                 max_workers: Optional[int] = None):
        super().__init__(0, max_workers)
        self._state = state
        self._optimizer = optimizer
        self._label = label

    def run(self) -> CheckReport:
        report = super().run()
        if self._label:
            report.name = f"{self.name}[{self._label}]"
        return report


class DerivativeCheck(_StateCheck):
    name = "derivatives"
    slack = DERIVATIVE_TOL

    def _cases(self):
        return (self._state,)

    def _evaluate(self, state: CQState) -> Sequence[float]:
        slopes = alpha_derivatives(state, self._optimizer)
        for name, (numeric, analytic) in slopes.items():
            logger.debug("d/dα %s at 1: numeric %.9g, analytic %.9g", name, numeric, analytic)
        return [abs(numeric - analytic) / max(1.0, abs(analytic))
                for numeric, analytic in slopes.values()]


def _joint_operators(state: CQState) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
    rho_e = state.blocks.sum(axis=0)
    joint = state.to_operator()
    references = {
        "conditional": np.kron(np.eye(state.alphabet_size), rho_e),
        "mutual": np.kron(np.diag(state.p), rho_e),
    }
    return joint, references


class MonotoneLimitCheck(_StateCheck):
    """
    D_α and D*_α non-decreasing along the α-grid (against 1 ⊗ ρ_E and
    ρ_X ⊗ ρ_E), and the conditional entropies / mutual informations at
    α = 1 ± 1e-4 within 1e-3 of their von Neumann values.
    """
    name = "monotone_and_limits"
    slack = 1e-9

    def _cases(self):
        return [("monotone", kind, ref) for kind in DivergenceKind
                for ref in ("conditional", "mutual")] + [("limit", q) for q in
                                                         ("h_down", "h_star", "i_down", "i_star")]

    def _evaluate(self, case: Tuple) -> Sequence[float]:
        if case[0] == "monotone":
            _, kind, ref = case
            joint, references = _joint_operators(self._state)
            values = [divergence(kind, joint, references[ref], a) for a in MONOTONE_ALPHAS]
            return [relative_excess(lo, hi) for lo, hi in zip(values, values[1:])]

        quantity = case[1]
        spectra = CQSpectra(self._state)
        functions = {
            "h_down": (lambda a: h_down(self._state, a, spectra), spectra.conditional_vn()),
            "h_star": (lambda a: h_star_result(self._state, a, self._optimizer)[0],
                       spectra.conditional_vn()),
            "i_down": (lambda a: i_down(self._state, a, spectra), spectra.mutual_vn()),
            "i_star": (lambda a: i_star_result(self._state, a, self._optimizer)[0],
                       spectra.mutual_vn()),
        }
        f, limit = functions[quantity]
        return [abs(f(1 + sign * LIMIT_OFFSET) - limit) / max(1.0, abs(limit)) - LIMIT_TOL
                for sign in (-1, 1)]


class AdditivityCheck(_StateCheck):
    """H↓_α and I↓_α double under the two-fold i.i.d. extension."""
    name = "additivity"
    slack = 1e-9

    def __init__(self, state: CQState, alphas: Sequence[float] = ADDITIVITY_ALPHAS, label: str = "",
                 max_workers: Optional[int] = None):
        super().__init__(state, label, None, max_workers)
        self._alphas = [float(a) for a in alphas]

    def _cases(self):
        return self._alphas

    def _evaluate(self, alpha: float) -> Sequence[float]:
        doubled = self._state.iid_extend(2)
        one, two = CQSpectra(self._state), CQSpectra(doubled)
        return [abs(relative_excess(h_down(doubled, alpha, two), 2 * h_down(self._state, alpha, one))),
                abs(relative_excess(i_down(doubled, alpha, two), 2 * i_down(self._state, alpha, one)))]


# ── Public operations ────────────────────────────────────────────

def check_trace_inequality(trials: int = 10_000, dims: Sequence[int] = (2, 3, 4, 5, 6),
                           seed: int = 0, max_workers: Optional[int] = None) -> CheckReport:
    return TraceInequalityCheck(trials, dims, seed, max_workers).run()


def check_concavity(trials: int = 1_000, seed: int = 0,
                    optimizer: Optional[OptimizerConfig] = None,
                    max_workers: Optional[int] = None) -> CheckReport:
    return ConcavityCheck(trials, seed, optimizer, max_workers).run()


def check_derivatives(state: CQState, optimizer: Optional[OptimizerConfig] = None,
                      label: str = "") -> CheckReport:
    return DerivativeCheck(state, label, optimizer).run()


def check_monotone_and_limits(state: CQState, optimizer: Optional[OptimizerConfig] = None,
                              label: str = "") -> CheckReport:
    return MonotoneLimitCheck(state, label, optimizer).run()


def check_additivity(state: CQState, alphas: Sequence[float] = ADDITIVITY_ALPHAS,
                     label: str = "") -> CheckReport:
    return AdditivityCheck(state, alphas, label).run()


def check_helstrom_attainment(trials: int = 1_000, seed: int = 0,
                              max_workers: Optional[int] = None) -> CheckReport:
    return HelstromCheck(trials, seed, max_workers).run()


SAMPLED_CHECKS = ("trace_inequality", "concavity", "helstrom_attainment")
STATE_CHECKS = ("derivatives", "monotone_and_limits", "additivity")
CHECK_NAMES = SAMPLED_CHECKS + STATE_CHECKS


def run_battery(selection: Optional[Iterable[str]] = None, trials: Optional[int] = None,
                seed: int = 0, config: Optional[VerifierConfig] = None,
                optimizer: Optional[OptimizerConfig] = None,
                states: Optional[Dict[str, CQState]] = None,
                max_workers: Optional[int] = None) -> List[CheckReport]:
    """
    Run the selected checks (all by default) in ``CHECK_NAMES`` order.

    ``trials`` overrides the per-check defaults of ``config`` for the
    sampled checks; the per-state checks run on ``states`` (the bundled
    fixtures by default).

    Raises:
        ValidationError: For unknown check names.
    """
    config = config or VerifierConfig()
    selected = list(CHECK_NAMES) if selection is None else [str(s) for s in selection]
    unknown = [s for s in selected if s not in CHECK_NAMES]
    if unknown:
        raise ValidationError(f"Unknown check(s) {', '.join(unknown)}. "
                              f"Expected any of: {', '.join(CHECK_NAMES)}.")
    if states is None:
        states = {name: build() for name, build in FIXTURES.items()}

    reports: List[CheckReport] = []
    for name in CHECK_NAMES:
        if name not in selected:
            continue
        if name == "trace_inequality":
            reports.append(check_trace_inequality(trials or config.trace_trials, config.trace_dims,
                                                  seed, max_workers))
        elif name == "concavity":
            reports.append(check_concavity(trials or config.concavity_trials, seed, optimizer,
                                           max_workers))
        elif name == "helstrom_attainment":
            reports.append(check_helstrom_attainment(trials or config.helstrom_trials, seed,
                                                     max_workers))
        else:
            for label, state in states.items():
                if name == "derivatives":
                    reports.append(check_derivatives(state, optimizer, label))
                elif name == "monotone_and_limits":
                    reports.append(check_monotone_and_limits(state, optimizer, label))
                else:
                    reports.append(check_additivity(state, label=label))
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.warning("verification failures: %s", ", ".join(failed))
    return reports
