"""
    Exponent envelopes, entropy-accumulation bounds and moderate-deviation tables.

    Rates are in nats.  The α-suprema run over the closed hull of each
    open interval; every envelope vanishes at α = 1, so reported exponents
    are never negative before clamping either.

        pa_conv  sup_{α∈[1/2,1]} ((1−α)/α)(R − H↓_{2−1/α})        1 − 4e^{−nE}
        pa_ach   sup_{α∈[1,2]}   ((α−1)/α)(H*_α − R)              e^{−nE}
        wt_ach   sup_{α∈[1,2]}   ((α−1)/α)(log L − I*_α)          2e^{−nE}
        wt_conv  sup_{α∈[1/2,1]} ((1−α)/α)(I↓_{2−1/α} − log L)    1 − 5e^{−nE}
        wt_err   sup_{α∈[1/2,1]} ((1−α)/α)(I↓_{2−1/α}(X:B) − log ML)   4e^{−nE}
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Type

import numpy as np

from api.exceptions import DomainError, ValidationError
from api.models.cq_state import CQState
from api.models.reports import (
    EABoundReport, EAParams, ExponentReport, ModerateRow, ModerateSchedule, ModerateTable,
)
from api.types import ModerateKind, TypeValidator

from privamp.config import ExponentConfig, OptimizerConfig

from .base_service import ExponentService, sup_alpha
from .renyi import CQSpectra, cond_var, h_down, h_star_result, i_down, i_star_result, mi_var

logger = logging.getLogger(__name__)

ZERO_VARIANCE = 1e-12


def _down_factor(alpha: float) -> float:
    return (1.0 - alpha) / alpha


def _up_factor(alpha: float) -> float:
    return (alpha - 1.0) / alpha


class _WarmStart:
    """Last minimiser along the α-grid."""

    def __init__(self):
        self.tau: Optional[np.ndarray] = None


# ── Privacy amplification ────────────────────────────────────────

class PAConverseExponent(ExponentService[CQSpectra]):
    kind = "pa_conv"
    interval = (0.5, 1.0)
    prefactor = 4.0
    converse = True

    def _prepare(self, state: CQState) -> CQSpectra:
        return CQSpectra(state)

    def _threshold(self, state: CQState, prepared: CQSpectra) -> float:
        return prepared.conditional_vn()

    def _envelope(self, state, prepared, rate, alpha):
        factor = _down_factor(alpha)
        if factor == 0:
            return 0.0
        return factor * (rate - h_down(state, 2.0 - 1.0 / alpha, prepared))


class PAAchievabilityExponent(ExponentService[_WarmStart]):
    kind = "pa_ach"
    interval = (1.0, 2.0)
    prefactor = 1.0
    converse = False

    def _prepare(self, state: CQState) -> _WarmStart:
        return _WarmStart()

    def _threshold(self, state, prepared):
        return CQSpectra(state).conditional_vn()

    def _envelope(self, state, prepared, rate, alpha):
        factor = _up_factor(alpha)
        if factor == 0:
            return 0.0
        value, result = h_star_result(state, alpha, self._optimizer, initial=prepared.tau)
        prepared.tau = result.minimizer
        return factor * (value - rate)


# ── Wiretap ──────────────────────────────────────────────────────

class _NonNegativeRate:
    def _validate_rate(self, rate: float) -> float:
        rate = super()._validate_rate(rate)
        if rate < 0:
            raise ValidationError(f"Rate log L must be ≥ 0, got {rate}.")
        return rate


class WiretapSecrecyExponent(_NonNegativeRate, ExponentService[_WarmStart]):
    kind = "wt_ach"
    interval = (1.0, 2.0)
    prefactor = 2.0
    converse = False

    def _prepare(self, state):
        return _WarmStart()

    def _threshold(self, state, prepared):
        return CQSpectra(state).mutual_vn()

    def _envelope(self, state, prepared, rate, alpha):
        factor = _up_factor(alpha)
        if factor == 0:
            return 0.0
        value, result = i_star_result(state, alpha, self._optimizer, initial=prepared.tau)
        prepared.tau = result.minimizer
        return factor * (rate - value)


class WiretapConverseExponent(_NonNegativeRate, ExponentService[CQSpectra]):
    kind = "wt_conv"
    interval = (0.5, 1.0)
    prefactor = 5.0
    converse = True

    def _prepare(self, state):
        return CQSpectra(state)

    def _threshold(self, state, prepared):
        return prepared.mutual_vn()

    def _envelope(self, state, prepared, rate, alpha):
        factor = _down_factor(alpha)
        if factor == 0:
            return 0.0
        return factor * (i_down(state, 2.0 - 1.0 / alpha, prepared) - rate)


class WiretapErrorExponent(WiretapConverseExponent):
    """Bob's decoding error bound 4(ML)^{(1−α)/α} e^{((α−1)/α) I↓_{2−1/α}(X:B)}."""
    kind = "wt_err"
    prefactor = 4.0
    converse = False


def _run(service: Type[ExponentService], state: CQState, rate: float, n_list: Iterable[int],
         exponents: Optional[ExponentConfig], optimizer: Optional[OptimizerConfig]) -> ExponentReport:
    return service(exponents, optimizer).execute(state, rate, n_list)


def pa_converse_exponent(state: CQState, rate: float, n_list: Iterable[int] = (),
                         exponents: Optional[ExponentConfig] = None,
                         optimizer: Optional[OptimizerConfig] = None) -> ExponentReport:
    return _run(PAConverseExponent, state, rate, n_list, exponents, optimizer)


def pa_achievability_exponent(state: CQState, rate: float, n_list: Iterable[int] = (),
                              exponents: Optional[ExponentConfig] = None,
                              optimizer: Optional[OptimizerConfig] = None) -> ExponentReport:
    return _run(PAAchievabilityExponent, state, rate, n_list, exponents, optimizer)


def wiretap_secrecy_exponent(sigma_xe: CQState, log_l: float, n_list: Iterable[int] = (),
                             exponents: Optional[ExponentConfig] = None,
                             optimizer: Optional[OptimizerConfig] = None) -> ExponentReport:
    return _run(WiretapSecrecyExponent, sigma_xe, log_l, n_list, exponents, optimizer)


def wiretap_converse_exponent(sigma_xe: CQState, log_l: float, n_list: Iterable[int] = (),
                              exponents: Optional[ExponentConfig] = None,
                              optimizer: Optional[OptimizerConfig] = None) -> ExponentReport:
    return _run(WiretapConverseExponent, sigma_xe, log_l, n_list, exponents, optimizer)


def wiretap_error_exponent(sigma_xb: CQState, log_ml: float, n_list: Iterable[int] = (),
                           exponents: Optional[ExponentConfig] = None,
                           optimizer: Optional[OptimizerConfig] = None) -> ExponentReport:
    return _run(WiretapErrorExponent, sigma_xb, log_ml, n_list, exponents, optimizer)


# ── Entropy accumulation ─────────────────────────────────────────

def _ea_term(params: EAParams, gap: float) -> float:
    """(n/2)(gap/V)²"""
    return 0.5 * params.n * (gap / params.V) ** 2


def ea_converse_bound(params: EAParams) -> float:
    """
    1 − (4/Pr[w]) e^{−(n/2)((R−f)/V)²}, possibly negative.

    Raises:
        DomainError: Unless 0 < R − f(w) < V.
    """
    gap = params.gap
    if not gap > 0:
        raise DomainError(f"Converse window violated: R − f(w) = {gap} is not > 0.")
    if not gap < params.V:
        raise DomainError(f"Converse window violated: R − f(w) = {gap} is not < V = {params.V}.")
    return 1.0 - (4.0 / params.prob_w) * math.exp(-_ea_term(params, gap))


def ea_achievability_bound(params: EAParams) -> float:
    """
    (1/Pr[w]) e^{−(n/2)((R−f)/V)²}, unclamped.

    Raises:
        DomainError: Unless 0 < f(w) − R ≤ V²/2.
    """
    slack = -params.gap
    if not slack > 0:
        raise DomainError(f"Achievability window violated: f(w) − R = {slack} is not > 0.")
    if not slack <= params.V ** 2 / 2:
        raise DomainError(
            f"Achievability window violated: f(w) − R = {slack} exceeds V²/2 = {params.V ** 2 / 2}."
        )
    return math.exp(-_ea_term(params, slack)) / params.prob_w


def ea_report(params: EAParams, side: str) -> EABoundReport:
    """Raw bound plus its value clamped into [0, 1]."""
    if side == "conv":
        raw = ea_converse_bound(params)
    elif side == "ach":
        raw = ea_achievability_bound(params)
    else:
        raise ValidationError(f"Unknown side '{side}'. Expected one of: ach, conv.")
    report = EABoundReport(side=side, params=params, raw=raw, value=min(1.0, max(0.0, raw)))
    if report.vacuous:
        logger.warning("entropy-accumulation %s bound is vacuous (raw %.6g)", side, raw)
    return report


# ── Moderate deviations ──────────────────────────────────────────

_MODERATE: Dict[ModerateKind, tuple] = {
    # service, sign of a_n in the rate, variance, threshold
    ModerateKind.PA_ACH: (PAAchievabilityExponent, -1.0, cond_var, "conditional"),
    ModerateKind.PA_CONV: (PAConverseExponent, +1.0, cond_var, "conditional"),
    ModerateKind.WT_ACH: (WiretapSecrecyExponent, +1.0, mi_var, "mutual"),
    ModerateKind.WT_CONV: (WiretapConverseExponent, -1.0, mi_var, "mutual"),
}


def normalized_exponent(service: ExponentService, exponent: float, n: int, a_n: float) -> float:
    """−(1/(n a²)) log(c e^{−nE}) = (nE − log c)/(n a²)."""
    return -service.log_term(exponent, n) / (n * a_n ** 2)


def moderate_table(state: CQState, kind: ModerateKind, schedule: ModerateSchedule,
                   exponents: Optional[ExponentConfig] = None,
                   optimizer: Optional[OptimizerConfig] = None,
                   max_workers: Optional[int] = None) -> ModerateTable:
    """
    Rows (n, a_n, R_n, bound, normalised exponent) with R_n = threshold ∓ a_n.

    Rows are computed concurrently and returned in schedule order.

    Raises:
        DomainError: If the relevant variance is below 1e-12.
    """
    kind = TypeValidator.parse_enum(kind, ModerateKind, "moderate kind")
    service_cls, sign, variance_fn, which = _MODERATE[kind]
    variance = variance_fn(state)
    if variance < ZERO_VARIANCE:
        raise DomainError(f"{kind.value}: information variance {variance:.3e} is zero; "
                          f"moderate deviations need V > 0.")
    spectra = CQSpectra(state)
    threshold = spectra.conditional_vn() if which == "conditional" else spectra.mutual_vn()
    service = service_cls(exponents, optimizer)

    def row(n: int) -> ModerateRow:
        a_n = schedule.a(n)
        rate = threshold + sign * a_n
        if rate < 0 and which == "mutual":
            logger.warning("%s: rate %.6g at n=%d is negative; row flagged", kind.value, rate, n)
            return ModerateRow(n, a_n, rate, float("nan"), float("nan"), in_window=False)
        report = service.execute(state, rate)
        e = report.exponent
        logger.debug("%s row n=%d: a_n=%.6g exponent=%.6g", kind.value, n, a_n, e)
        return ModerateRow(n, a_n, rate, service.bound(e, n), normalized_exponent(service, e, n, a_n))

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows: List[ModerateRow] = list(pool.map(row, schedule.n_list))
    return ModerateTable(kind=kind.value, threshold=threshold, variance=variance,
                         limit=1.0 / (2.0 * variance), rows=rows)


def moderate_ea_table(f_w: float, V: float, prob_w: float, schedule: ModerateSchedule,
                      side: str = "conv") -> ModerateTable:
    """
    Entropy-accumulation rows at R_n = f(w) ± a_n (+ for the converse).

    The normalised exponent is evaluated in log space,
    ((n/2)(a_n/V)² − log(c/Pr[w]))/(n a_n²) with c = 4 (converse) or 1.
    Rows outside the bound's window are flagged, not dropped.
    """
    if side not in ("ach", "conv"):
        raise ValidationError(f"Unknown side '{side}'. Expected one of: ach, conv.")
    EAParams(f_w=f_w, V=V, prob_w=prob_w, R=f_w, n=0)
    constant = 4.0 if side == "conv" else 1.0
    rows = []
    for n in schedule.n_list:
        a_n = schedule.a(n)
        if side == "conv":
            rate, in_window = f_w + a_n, 0 < a_n < V
        else:
            rate, in_window = f_w - a_n, 0 < a_n <= V ** 2 / 2
        if not in_window:
            logger.warning("ea_%s: a_n=%.6g at n=%d lies outside the bound's window", side, a_n, n)
        exponent_term = 0.5 * n * (a_n / V) ** 2
        log_term = math.log(constant / prob_w) - exponent_term
        bound = 1.0 - math.exp(log_term) if side == "conv" else math.exp(log_term)
        rows.append(ModerateRow(n, a_n, rate, min(1.0, max(0.0, bound)),
                                -log_term / (n * a_n ** 2), in_window))
    return ModerateTable(kind=f"ea_{side}", threshold=f_w, variance=V,
                         limit=1.0 / (2.0 * V ** 2), rows=rows)
