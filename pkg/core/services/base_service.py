"""
    Generic base service for exponent envelopes.

    Design Pattern: Template Method
    ─────────────────────────────────
    Every exponent in the toolkit has the same skeleton

        validate rate → prepare state → threshold →
        sup over α of the envelope → clamp → bound at each n

    and differs only in the envelope term, the α-interval and the form of
    the finite-blocklength bound.  Concrete subclasses
    (``PAConverseExponent``, ``WiretapSecrecyExponent``, …) override the
    steps; ``execute`` fixes their order.

    Genericity:
    ─────────────────────────
    ``ExponentService[TPrepared]`` lets each service declare what it caches
    per state (eigen-decompositions, minimiser warm starts).
"""
import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, ClassVar, Dict, Generic, Iterable, Optional, Tuple, TypeVar

import numpy as np
from scipy.optimize import minimize_scalar

from api.exceptions import ValidationError
from api.models.cq_state import CQState
from api.models.reports import ExponentReport

from privamp.config import ExponentConfig, OptimizerConfig

logger = logging.getLogger(__name__)

TPrepared = TypeVar('TPrepared')


def sup_alpha(objective: Callable[[float], float], lo: float, hi: float,
              grid_points: int = 512, alpha_tol: float = 1e-9) -> Tuple[float, float]:
    """
    Maximise a continuous function on the closed interval [lo, hi].

    Evaluates a uniform grid, then refines the best cell with bounded
    Brent / golden-section search to width ``alpha_tol``; the larger of the
    grid and refined values wins.

    Returns:
        (alpha_star, value)
    """
    if not hi > lo:
        raise ValidationError(f"Empty α-interval [{lo}, {hi}].")
    grid = np.linspace(lo, hi, max(int(grid_points), 2))
    values = np.array([objective(float(a)) for a in grid])
    best = int(np.argmax(values))
    alpha_star, value = float(grid[best]), float(values[best])

    left = grid[max(best - 1, 0)]
    right = grid[min(best + 1, grid.size - 1)]
    refined = minimize_scalar(lambda a: -objective(float(a)), bounds=(left, right),
                              method="bounded", options={"xatol": alpha_tol})
    if refined.success and -refined.fun > value:
        alpha_star, value = float(refined.x), float(-refined.fun)
    return alpha_star, value


class ExponentService(ABC, Generic[TPrepared]):
    """
    Abstract base for exponent envelopes of the form sup_α φ(α).

    Class attributes:
        kind:      Report label.
        interval:  Closed α-hull of the supremum.
        prefactor: Constant c of the bound c·e^{−nE} (or 1 − c·e^{−nE}).
        converse:  Whether the bound is a lower bound 1 − c·e^{−nE}.
    """
    kind: ClassVar[str]
    interval: ClassVar[Tuple[float, float]]
    prefactor: ClassVar[float]
    converse: ClassVar[bool]

    def __init__(self, exponents: Optional[ExponentConfig] = None,
                 optimizer: Optional[OptimizerConfig] = None):
        self._exponents = exponents or ExponentConfig()
        self._optimizer = optimizer or OptimizerConfig()

    def execute(self, state: CQState, rate: float, n_list: Iterable[int] = ()) -> ExponentReport:
        """
        Template Method: validate → prepare → threshold → sup_α → bounds.
        """
        rate = self._validate_rate(rate)
        prepared = self._prepare(state)
        threshold = self._threshold(state, prepared)
        lo, hi = self.interval
        alpha_star, raw = sup_alpha(lambda a: self._envelope(state, prepared, rate, a), lo, hi,
                                    self._exponents.grid_points, self._exponents.alpha_tol)
        exponent = max(0.0, raw)
        report = ExponentReport(kind=self.kind, rate=rate, exponent=exponent,
                                alpha_star=alpha_star, threshold=threshold, raw_exponent=raw)
        for n in n_list:
            report.raw_bounds[int(n)] = self.raw_bound(exponent, int(n))
            report.bounds[int(n)] = self.bound(exponent, int(n))
        logger.info("%s at rate %.6g: exponent %.6g (α* = %.6g, threshold %.6g)",
                    self.kind, rate, exponent, alpha_star, threshold)
        return report

    # ── Bound forms ──────────────────────────────────────────────

    def raw_bound(self, exponent: float, n: int) -> float:
        term = self.prefactor * math.exp(-n * exponent)
        return 1.0 - term if self.converse else term

    def bound(self, exponent: float, n: int) -> float:
        return min(1.0, max(0.0, self.raw_bound(exponent, n)))

    def log_term(self, exponent: float, n: int) -> float:
        """log of the c·e^{−nE} term, computed without underflow."""
        return math.log(self.prefactor) - n * exponent

    # ── Steps ────────────────────────────────────────────────────

    def _validate_rate(self, rate: float) -> float:
        rate = float(rate)
        if not math.isfinite(rate):
            raise ValidationError(f"Rate must be finite, got {rate}.")
        return rate

    @abstractmethod
    def _prepare(self, state: CQState) -> TPrepared:
        """Per-state cache shared by all envelope evaluations."""
        ...

    @abstractmethod
    def _threshold(self, state: CQState, prepared: TPrepared) -> float:
        ...

    @abstractmethod
    def _envelope(self, state: CQState, prepared: TPrepared, rate: float, alpha: float) -> float:
        """The envelope φ(α); must be 0 at α = 1."""
        ...
