"""
    One-shot bound forms beyond the optimised exponents.

    leftover_hash_bound        min(1, e^{(n/2)(R − H*_2)})
    converse_proof_step_bound  max_{s∈[0,1]} 1 − 2^{1+s} e^{−n s (R − H↓_{1−s})}
    extractable_length         achievable / converse key lengths at security ε
    quantum_wiretap            c-q wiretap channel from a Kraus channel + input states
"""
import logging
import math
from typing import Any, Optional, Sequence, Tuple

from api.exceptions import ValidationError
from api.models.cq_state import CQState, KrausChannel, WiretapChannel
from api.models.reports import LengthReport

from privamp.config import ExponentConfig, OptimizerConfig

from .base_service import sup_alpha
from .renyi import CQSpectra, h_down, h_star_result

logger = logging.getLogger(__name__)

# Distance of the open endpoint α = 1 kept by the length optimisation,
# where the ε-penalty α/|α−1| diverges.
_LENGTH_EDGE = 1e-3


def leftover_hash_bound(state: CQState, rate: float, n: int = 1,
                        optimizer: Optional[OptimizerConfig] = None) -> float:
    """Collision-entropy form of the achievability bound (α = 2)."""
    h2, _ = h_star_result(state, 2.0, optimizer)
    return min(1.0, math.exp(0.5 * n * (rate - h2)))


def converse_proof_step_bound(state: CQState, rate: float, n: int = 1,
                              exponents: Optional[ExponentConfig] = None) -> Tuple[float, float]:
    """
    The converse bound before 2·2^s is relaxed to 4.

    Returns:
        (value clamped at 0, maximising s)
    """
    exponents = exponents or ExponentConfig()
    spectra = CQSpectra(state)

    def objective(s: float) -> float:
        if s == 0:
            return -1.0
        log_term = (1 + s) * math.log(2) - n * s * (rate - h_down(state, 1.0 - s, spectra))
        return 1.0 - math.exp(min(log_term, 700.0))

    s_star, value = sup_alpha(objective, 0.0, 1.0, exponents.grid_points, exponents.alpha_tol)
    return max(0.0, value), s_star


def extractable_length(state: CQState, eps: float,
                       exponents: Optional[ExponentConfig] = None,
                       optimizer: Optional[OptimizerConfig] = None) -> LengthReport:
    """
    Bounds on log|Z| (nats) at trace-distance security ε.

    Raises:
        ValidationError: If ε ∉ (0, 1).
    """
    eps = float(eps)
    if not 0 < eps < 1:
        raise ValidationError(f"ε must lie in (0, 1), got {eps}.")
    exponents = exponents or ExponentConfig()
    spectra = CQSpectra(state)
    warm = {"tau": None}

    def achievable(alpha: float) -> float:
        value, result = h_star_result(state, alpha, optimizer, initial=warm["tau"])
        warm["tau"] = result.minimizer
        return value - alpha / (alpha - 1) * math.log(1 / eps)

    def converse(alpha: float) -> float:
        return -(h_down(state, 2 - 1 / alpha, spectra)
                 + alpha / (1 - alpha) * math.log(4 / (1 - eps)))

    lower_alpha, lower = sup_alpha(achievable, 1 + _LENGTH_EDGE, 2.0,
                                   exponents.grid_points, exponents.alpha_tol)
    upper_alpha, neg_upper = sup_alpha(converse, 0.5, 1 - _LENGTH_EDGE,
                                       exponents.grid_points, exponents.alpha_tol)
    h2, _ = h_star_result(state, 2.0, optimizer)
    report = LengthReport(
        eps=eps, lower=lower, lower_alpha=lower_alpha, upper=-neg_upper, upper_alpha=upper_alpha,
        lower_collision=h2 - 2 * math.log(1 / eps),
        upper_two_thirds=h_down(state, 0.5, spectra) + 2 * math.log(4 / (1 - eps)),
    )
    logger.info("extractable length at ε=%.3g: [%.6g, %.6g] nats", eps, report.lower, report.upper)
    return report


def quantum_wiretap(channel: KrausChannel, inputs: Sequence[Any],
                    p: Any) -> Tuple[WiretapChannel, CQState, CQState]:
    """
    σ_BE^x = V ρ^x V† for the Stinespring isometry V of ``channel``.

    Returns:
        (wiretap channel, σ_XB, σ_XE)
    """
    if len(inputs) == 0:
        raise ValidationError("quantum_wiretap needs at least one input state.")
    wiretap = channel.stinespring().wiretap_channel(inputs)
    return wiretap, wiretap.induced_cq(p, "B"), wiretap.induced_cq(p, "E")
