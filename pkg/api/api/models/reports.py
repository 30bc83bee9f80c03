"""
    Result records.

    Every computation that leaves the library does so as one of these
    dataclasses.  Values are in nats; unit conversion happens only when a
    report is serialized.  ``to_dict`` returns plain Python values (no numpy
    scalars) so the serializer can emit canonical JSON.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..exceptions import ValidationError


def _f(x: Any) -> float:
    return float(x)


# ── Exponents ────────────────────────────────────────────────────

@dataclass
class ExponentReport:
    """
    Exponent envelope at a single rate.

    Attributes:
        kind:          Bound family, e.g. ``pa_conv`` or ``wt_ach``.
        rate:          Rate R (or log L / log ML) in nats.
        exponent:      Clamped exponent, ≥ 0.
        alpha_star:    Maximiser of the envelope on the closed α-interval.
        threshold:     First-order quantity (H(X|E), I(X:E) or I(X:B)).
        raw_exponent:  Envelope supremum before clamping at 0.
        bounds:        n → bound value clamped into [0, 1].
        raw_bounds:    n → unclamped bound formula value.
    """
    kind: str
    rate: float
    exponent: float
    alpha_star: float
    threshold: float
    raw_exponent: float
    bounds: Dict[int, float] = field(default_factory=dict)
    raw_bounds: Dict[int, float] = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        """True when the exponent is zero, i.e. the bound carries no information."""
        return self.exponent <= 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "rate": _f(self.rate),
            "exponent": _f(self.exponent),
            "alpha_star": _f(self.alpha_star),
            "threshold": _f(self.threshold),
            "vacuous": self.vacuous,
            "bounds": {str(n): _f(b) for n, b in sorted(self.bounds.items())},
            "raw": {
                "exponent": _f(self.raw_exponent),
                "bounds": {str(n): _f(b) for n, b in sorted(self.raw_bounds.items())},
            },
        }


@dataclass(frozen=True)
class EAParams:
    """
    Inputs of the entropy-accumulation bounds.

    Attributes:
        f_w:    Tradeoff function value at the observed statistics (nats).
        V:      Accumulation constant, V > 2.
        prob_w: Pr[wt(T) = w] ∈ (0, 1].
        R:      Rate (nats).
        n:      Number of rounds, n ≥ 0.
    """
    f_w: float
    V: float
    prob_w: float
    R: float
    n: int = 1

    def __post_init__(self):
        if not self.V > 2:
            raise ValidationError(f"V must exceed 2, got {self.V}.")
        if not 0 < self.prob_w <= 1:
            raise ValidationError(f"prob_w must lie in (0, 1], got {self.prob_w}.")
        if int(self.n) != self.n or self.n < 0:
            raise ValidationError(f"n must be a non-negative integer, got {self.n}.")

    @property
    def gap(self) -> float:
        """R − f(w)."""
        return self.R - self.f_w

    def to_dict(self) -> Dict[str, Any]:
        return {"f_w": _f(self.f_w), "V": _f(self.V), "prob_w": _f(self.prob_w),
                "R": _f(self.R), "n": int(self.n)}


@dataclass
class EABoundReport:
    side: str
    params: EAParams
    raw: float
    value: float

    @property
    def vacuous(self) -> bool:
        return not 0.0 < self.raw < 1.0

    def to_dict(self) -> Dict[str, Any]:
        return {"side": self.side, "params": self.params.to_dict(), "raw": _f(self.raw),
                "value": _f(self.value), "vacuous": self.vacuous}


@dataclass(frozen=True)
class ModerateSchedule:
    """
    Moderate-deviation sequence a_n = n^{-t}.

    Attributes:
        exponent_t: t ∈ (0, 1/2).
        n_list:     Strictly increasing positive blocklengths.
    """
    exponent_t: float
    n_list: Tuple[int, ...]

    def __post_init__(self):
        if not 0 < self.exponent_t < 0.5:
            raise ValidationError(f"Schedule exponent t must lie in (0, 1/2), got {self.exponent_t}.")
        ns = tuple(int(n) for n in self.n_list)
        if not ns or ns[0] < 1 or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValidationError(f"n_list must be strictly increasing positive integers, got {list(ns)}.")
        object.__setattr__(self, "n_list", ns)

    def a(self, n: int) -> float:
        return float(n) ** (-self.exponent_t)


@dataclass
class ModerateRow:
    n: int
    a_n: float
    rate: float
    bound: float
    normalized_exponent: float
    in_window: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {"n": int(self.n), "a_n": _f(self.a_n), "rate": _f(self.rate),
                "bound": _f(self.bound), "normalized_exponent": _f(self.normalized_exponent),
                "in_window": self.in_window}


@dataclass
class ModerateTable:
    """
    Attributes:
        kind:      ``pa_ach``, ``pa_conv``, ``wt_ach``, ``wt_conv``, ``ea_ach`` or ``ea_conv``.
        threshold: First-order quantity the rates approach.
        variance:  V(X|E), V(X:E), or the accumulation parameter V.
        limit:     The limiting normalized exponent 1/(2V) (1/(2V²) for accumulation).
        rows:      One row per n, in schedule order.
    """
    kind: str
    threshold: float
    variance: float
    limit: float
    rows: List[ModerateRow] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "threshold": _f(self.threshold), "variance": _f(self.variance),
                "limit": _f(self.limit), "rows": [r.to_dict() for r in self.rows]}


@dataclass
class LengthReport:
    """
    Bounds on the extractable key length log|Z| at security ε.

    Attributes:
        lower / lower_alpha:   Achievable length and its optimal α ∈ (1, 2].
        upper / upper_alpha:   Converse length and its optimal α ∈ (1/2, 1).
        lower_collision:       H*_2 − 2 log(1/ε).
        upper_two_thirds:      H↓_{1/2} + 2 log(4/(1−ε)).
    """
    eps: float
    lower: float
    lower_alpha: float
    upper: float
    upper_alpha: float
    lower_collision: float
    upper_two_thirds: float

    def to_dict(self) -> Dict[str, Any]:
        return {"eps": _f(self.eps), "length_lower": _f(self.lower), "lower_alpha": _f(self.lower_alpha),
                "length_upper": _f(self.upper), "upper_alpha": _f(self.upper_alpha),
                "length_lower_collision": _f(self.lower_collision),
                "length_upper_two_thirds": _f(self.upper_two_thirds)}


# ── Simulation ───────────────────────────────────────────────────

@dataclass
class PAResult:
    """
    Exact or sampled ε_PA.

    Attributes:
        exact:        True for full-family enumeration.
        value:        Average trace distance, in [0, 1].
        family_size:  2^{2u}.
        u, v:         Hash input/output widths.
        per_hash:     Optional (a, b, distance) breakdown.
        std_error:    Sample standard error (sampled mode only).
        trials:       Number of sampled hashes (sampled mode only).
        seed:         RNG seed (sampled mode only).
    """
    exact: bool
    value: float
    family_size: int
    u: int
    v: int
    per_hash: Optional[List[Tuple[int, int, float]]] = None
    std_error: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None

    def to_dict(self, include_breakdown: bool = False) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "mode": "exact" if self.exact else "sampled",
            "value": _f(self.value),
            "family_size": int(self.family_size),
            "u": int(self.u),
            "v": int(self.v),
        }
        if not self.exact:
            out.update(std_error=_f(self.std_error), trials=int(self.trials), seed=int(self.seed))
        if include_breakdown and self.per_hash is not None:
            out["per_hash"] = [[int(a), int(b), _f(d)] for a, b, d in self.per_hash]
        return out


@dataclass
class SandwichReport:
    """
    Exact ε_PA on ρ^{⊗n} against both exponent bounds at R = v·log 2 per copy.

    Attributes:
        lower_refined: Converse bound before the 2·2^s prefactor is relaxed to 4.
    """
    n: int
    rate: float
    exact: float
    upper: float
    lower: float
    lower_refined: float
    ach_exponent: float
    conv_exponent: float
    slack: float = 1e-9

    @property
    def upper_pass(self) -> bool:
        return self.exact <= self.upper + self.slack

    @property
    def lower_pass(self) -> bool:
        return self.lower - self.slack <= self.exact

    @property
    def passed(self) -> bool:
        return self.upper_pass and self.lower_pass

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": int(self.n), "rate": _f(self.rate), "exact": _f(self.exact),
            "upper": _f(self.upper), "lower": _f(self.lower),
            "lower_refined": _f(self.lower_refined),
            "ach_exponent": _f(self.ach_exponent), "conv_exponent": _f(self.conv_exponent),
            "verdict": {"upper": "pass" if self.upper_pass else "fail",
                        "lower": "pass" if self.lower_pass else "fail"},
        }


@dataclass
class SweepRow:
    n: int
    rate: float
    exact: float
    upper: float
    lower: float

    def to_dict(self) -> Dict[str, Any]:
        return {"n": int(self.n), "rate": _f(self.rate), "exact": _f(self.exact),
                "upper": _f(self.upper), "lower": _f(self.lower)}


@dataclass
class WiretapResult:
    """
    E_{C,h}[d₁] under both conventions for unbalanced hashes.

    Attributes:
        actual:            Unbalanced hashes contribute the d₁ of publicly announcing the message.
        worst_case:       Unbalanced hashes contribute 1.
        balanced_fraction: Fraction of the hash family that is balanced.
    """
    mode: str
    M: int
    L: int
    actual: float
    worst_case: float
    balanced_fraction: float
    codebooks: int
    std_error: Optional[float] = None
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {"mode": self.mode, "M": int(self.M), "L": int(self.L), "actual": _f(self.actual),
               "worst_case": _f(self.worst_case),
               "balanced_fraction": _f(self.balanced_fraction), "codebooks": int(self.codebooks)}
        if self.mode == "mc":
            out.update(std_error=_f(self.std_error), seed=int(self.seed))
        return out


@dataclass
class WiretapSandwichReport:
    """
    d₁ against min(1, 2e^{-E_ach}) (worst-case average) and
    max(0, 1 − 5e^{-E_conv}) (actual average); a side is only checked when
    its exponent is positive.
    """
    result: WiretapResult
    ach_exponent: float
    conv_exponent: float
    upper: float
    lower: float
    slack: float = 1e-9

    @property
    def upper_pass(self) -> bool:
        return self.ach_exponent <= 0 or self.result.worst_case <= self.upper + self.slack

    @property
    def lower_pass(self) -> bool:
        return self.conv_exponent <= 0 or self.lower - self.slack <= self.result.actual

    @property
    def passed(self) -> bool:
        return self.upper_pass and self.lower_pass

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d1": self.result.to_dict(), "ach_exponent": _f(self.ach_exponent),
            "conv_exponent": _f(self.conv_exponent), "upper": _f(self.upper), "lower": _f(self.lower),
            "verdict": {"upper": "pass" if self.upper_pass else "fail",
                        "lower": "pass" if self.lower_pass else "fail"},
        }


# ── Verification ─────────────────────────────────────────────────

@dataclass
class CheckReport:
    """
    Outcome of one verifier check.

    Attributes:
        name:            Check name.
        trials:          Trials evaluated (excluded ones included).
        worst_violation: max (LHS − RHS)/max(1, |RHS|) over trials; ≤ 0 means no violation.
        slack:           Allowed violation.
        seed:            RNG seed.
        excluded:        Trials dropped for minimizer non-convergence.
        failures:        Side conditions that failed (tightness, exclusion budget).
    """
    name: str
    trials: int
    worst_violation: float
    slack: float
    seed: int
    excluded: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.worst_violation <= self.slack and not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "trials": int(self.trials),
                "worst_violation": _f(self.worst_violation), "slack": _f(self.slack),
                "pass": self.passed, "seed": int(self.seed), "excluded": int(self.excluded),
                "failures": list(self.failures)}
