"""
    Exact and Monte-Carlo evaluation of ε_PA and d₁, and the sandwich harness.

    ε_PA for one hash factors over output blocks:

        ½ Σ_z ‖ Σ_{x ∈ h⁻¹(z)} p(x)ρ_x − ρ_E/|Z| ‖₁

    The exact average walks the family one multiplier a at a time: all
    2^u offsets b are evaluated together (their block sums come from a
    single ``np.add.at``), and the eigenvalues of every difference block are
    taken in one batched call.  Per-hash distances are collected in family
    order and averaged by ``np.mean`` (pairwise summation), so the result
    does not depend on the number of worker threads.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from api.exceptions import CapacityError, ValidationError
from api.linalg import trace_norm
from api.models.cq_state import Codebook, CQState, WiretapChannel, eve_states, wiretap_joint_blocks
from api.models.hashing import (
    AffineHash, GFContext, enumerate_family, is_balanced, sample_hashes,
)
from api.models.reports import PAResult, SandwichReport, SweepRow, WiretapResult, WiretapSandwichReport
from api.tolerances import DEFAULT_LIMITS, Limits

from privamp.config import ExponentConfig, OptimizerConfig

from .bounds import converse_proof_step_bound
from .exponents import (
    pa_achievability_exponent, pa_converse_exponent, wiretap_converse_exponent,
    wiretap_secrecy_exponent,
)
from .sampling import rng_for

logger = logging.getLogger(__name__)


def _check_widths(state: CQState, ctx: GFContext, v: int) -> None:
    if state.alphabet_size != ctx.order:
        raise ValidationError(
            f"Alphabet size {state.alphabet_size} does not match 2^u = {ctx.order}; pad the state first."
        )
    if not 1 <= int(v) <= ctx.u:
        raise ValidationError(f"Output width v={v} outside [1, u={ctx.u}].")


def _distances_for_tables(state: CQState, tables: np.ndarray, v: int) -> np.ndarray:
    """
    Trace distances for a batch of hashes given as output tables [hash, x].
    """
    nz = 1 << v
    d = state.dim_e
    nh = tables.shape[0]
    blocks = state.blocks
    sums = np.zeros((nh * nz, d, d), dtype=complex)
    flat = (np.arange(nh)[:, None] * nz + tables).ravel()
    np.add.at(sums, flat, np.broadcast_to(blocks, (nh,) + blocks.shape).reshape(-1, d, d))
    sums -= blocks.sum(axis=0) / nz
    eigs = np.linalg.eigvalsh(sums)
    per_block = np.abs(eigs).sum(axis=1).reshape(nh, nz)
    return np.clip(0.5 * per_block.sum(axis=1), 0.0, 1.0)


def hash_distance(state: CQState, h: AffineHash) -> float:
    """½‖R^h(ρ_XE) − (1_Z/|Z|) ⊗ ρ_E‖₁ for a single hash."""
    _check_widths(state, h.ctx, h.v)
    return float(_distances_for_tables(state, h.table()[None, :], h.v)[0])


def exact_pa_distance(state: CQState, ctx: GFContext, v: int,
                      include_breakdown: bool = False,
                      limits: Limits = DEFAULT_LIMITS,
                      max_workers: Optional[int] = None) -> PAResult:
    """
    ε_PA averaged over all 2^{2u} affine hashes.

    Raises:
        ValidationError: If |X| ≠ 2^u or v is out of range.
        CapacityError:   If u exceeds the enumeration limit.
    """
    _check_widths(state, ctx, v)
    family = enumerate_family(ctx, v, limits.enumerate_u)

    def slice_for(a: int) -> np.ndarray:
        return _distances_for_tables(state, family.outputs_for_multiplier(a), v)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        per_a = list(pool.map(slice_for, range(ctx.order)))
    distances = np.concatenate(per_a)
    value = float(np.clip(np.mean(distances), 0.0, 1.0))
    breakdown = None
    if include_breakdown:
        breakdown = [(a, b, float(distances[a * ctx.order + b]))
                     for a in range(ctx.order) for b in range(ctx.order)]
    logger.info("exact ε_PA over %d hashes (u=%d, v=%d): %.12g", len(family), ctx.u, v, value)
    return PAResult(exact=True, value=value, family_size=len(family), u=ctx.u, v=int(v),
                    per_hash=breakdown)


def sampled_pa_distance(state: CQState, ctx: GFContext, v: int, trials: int, seed: int,
                        include_breakdown: bool = False) -> PAResult:
    """
    Monte-Carlo ε_PA over ``trials`` hashes drawn uniformly from the family.

    The standard error is the sample standard deviation over √trials.
    """
    _check_widths(state, ctx, v)
    trials = int(trials)
    if trials < 1:
        raise ValidationError(f"trials must be ≥ 1, got {trials}.")
    pairs = sample_hashes(ctx, v, trials, seed)
    tables = np.stack([AffineHash(ctx, v, int(a), int(b)).table() for a, b in pairs])
    distances = _distances_for_tables(state, tables, v)
    value = float(np.mean(distances))
    std_error = float(np.std(distances, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    breakdown = None
    if include_breakdown:
        breakdown = [(int(a), int(b), float(d)) for (a, b), d in zip(pairs, distances)]
    logger.info("sampled ε_PA over %d hashes (seed %d): %.6g ± %.2g", trials, seed, value, std_error)
    return PAResult(exact=False, value=value, family_size=ctx.order ** 2, u=ctx.u, v=int(v),
                    per_hash=breakdown, std_error=std_error, trials=trials, seed=int(seed))


# ── Sandwich ─────────────────────────────────────────────────────

def sandwich_check(state: CQState, ctx: GFContext, v: int, n: int = 1,
                   limits: Limits = DEFAULT_LIMITS,
                   exponents: Optional[ExponentConfig] = None,
                   optimizer: Optional[OptimizerConfig] = None,
                   max_workers: Optional[int] = None) -> SandwichReport:
    """
    Exact ε_PA on ρ^{⊗n} with an (n·u → n·v)-bit hash against both bounds
    at rate R = v·log 2 per copy.

    Raises:
        CapacityError: If the n-fold state or its hash family is too large.
    """
    _check_widths(state, ctx, v)
    n = int(n)
    extended = state.iid_extend(n, limits.explicit_size)
    ctx_n = GFContext(n * ctx.u) if n > 1 else ctx
    exact = exact_pa_distance(extended, ctx_n, n * v, limits=limits, max_workers=max_workers).value

    rate = v * math.log(2)
    ach = pa_achievability_exponent(state, rate, (n,), exponents, optimizer)
    conv = pa_converse_exponent(state, rate, (n,), exponents, optimizer)
    refined, _ = converse_proof_step_bound(state, rate, n, exponents)
    report = SandwichReport(n=n, rate=rate, exact=exact, upper=ach.bounds[n], lower=conv.bounds[n],
                            lower_refined=refined, ach_exponent=ach.exponent,
                            conv_exponent=conv.exponent)
    if not report.passed:
        logger.warning("sandwich violated at n=%d: lower %.12g, exact %.12g, upper %.12g",
                       n, report.lower, exact, report.upper)
    return report


def sweep(state: CQState, ctx: GFContext, v: int, n_list: Iterable[int],
          limits: Limits = DEFAULT_LIMITS,
          exponents: Optional[ExponentConfig] = None,
          optimizer: Optional[OptimizerConfig] = None,
          max_workers: Optional[int] = None) -> List[SweepRow]:
    """Sandwich rows (n, R, exact, upper, lower) in ``n_list`` order."""
    def row(n: int) -> SweepRow:
        r = sandwich_check(state, ctx, v, n, limits, exponents, optimizer)
        return SweepRow(n=r.n, rate=r.rate, exact=r.exact, upper=r.upper, lower=r.lower)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(row, [int(n) for n in n_list]))


# ── Wiretap ──────────────────────────────────────────────────────

def _log2_exact(value: int, name: str) -> int:
    value = int(value)
    if value < 1 or value & (value - 1):
        raise ValidationError(f"{name} must be a positive power of two, got {value}.")
    return value.bit_length() - 1


def d1_balanced(per_message: np.ndarray, average: np.ndarray) -> float:
    """½ (1/M) Σ_m ‖σ_m − σ^C_E‖₁."""
    return 0.5 * float(np.mean([trace_norm(s - average) for s in per_message]))


def announced_d1(M: int) -> float:
    """d₁ when Eve learns the message outright: ½‖Σ_m |m⟩⟨m|⊗|m⟩⟨m|/M − π_M ⊗ π_M‖₁."""
    return 1.0 - 1.0 / M


def _codebook_hash_d1(codebook: Codebook, h: AffineHash, sigma: np.ndarray, M: int) -> Tuple[float, float]:
    """(actual, worst-case) d₁ for one codebook and hash."""
    if not is_balanced(h):
        return announced_d1(M), 1.0
    per_message, average = wiretap_joint_blocks(codebook, h, sigma)
    value = d1_balanced(per_message, average)
    return value, value


def wiretap_d1(channel: Union[WiretapChannel, np.ndarray], p, M: int, L: int, mode: str = "exact",
               trials: int = 1000, seed: int = 0, limits: Limits = DEFAULT_LIMITS) -> WiretapResult:
    """
    E_{C,h}[d₁] over i.i.d. codebooks drawn from ``p`` and the affine family
    on ML = 2^u codeword indices.

    Raises:
        ValidationError: For bad M, L, mode or trials.
        CapacityError:   If exact enumeration exceeds the configured limit.
    """
    sigma = eve_states(channel)
    prior = np.asarray(p, dtype=float)
    if prior.size != sigma.shape[0] or abs(prior.sum() - 1) > 1e-10 or np.min(prior) < 0:
        raise ValidationError(f"Prior must be a probability vector over {sigma.shape[0]} symbols.")
    u = _log2_exact(M * L, "M·L")
    v = _log2_exact(M, "M")
    if u == 0 or v == 0:
        raise ValidationError("Wiretap simulation needs M ≥ 2.")
    ctx = GFContext(u)
    size = ctx.order
    family_size = size ** 2

    if mode == "exact":
        support = np.flatnonzero(prior > 0)
        codebooks = len(support) ** size
        if codebooks * family_size > limits.wiretap_enumeration:
            raise CapacityError(
                f"Exact d₁ needs {codebooks}·{family_size} evaluations, above the limit "
                f"{limits.wiretap_enumeration}; use mode 'mc'."
            )
        actual = worst = 0.0
        for entries in itertools.product(support, repeat=size):
            weight = float(np.prod(prior[list(entries)]))
            codebook = Codebook(entries, sigma.shape[0])
            acc_a = acc_w = 0.0
            for a in range(size):
                for b in range(size):
                    da, dw = _codebook_hash_d1(codebook, AffineHash(ctx, v, a, b), sigma, M)
                    acc_a += da
                    acc_w += dw
            actual += weight * acc_a / family_size
            worst += weight * acc_w / family_size
        result = WiretapResult(mode="exact", M=M, L=L, actual=actual, worst_case=worst,
                               balanced_fraction=(size - 1) / size, codebooks=codebooks)
    elif mode == "mc":
        trials = int(trials)
        if trials < 1:
            raise ValidationError(f"trials must be ≥ 1, got {trials}.")
        rng = rng_for(seed)
        pairs = sample_hashes(ctx, v, trials, seed)
        actual_vals = np.empty(trials)
        worst_vals = np.empty(trials)
        for k, (a, b) in enumerate(pairs):
            codebook = Codebook(rng.choice(prior.size, size=size, p=prior), sigma.shape[0])
            actual_vals[k], worst_vals[k] = _codebook_hash_d1(
                codebook, AffineHash(ctx, v, int(a), int(b)), sigma, M)
        std_error = float(np.std(actual_vals, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        result = WiretapResult(mode="mc", M=M, L=L, actual=float(np.mean(actual_vals)),
                               worst_case=float(np.mean(worst_vals)),
                               balanced_fraction=float(np.mean(pairs[:, 0] != 0)),
                               codebooks=trials, std_error=std_error, seed=int(seed))
    else:
        raise ValidationError(f"Unknown mode '{mode}'. Expected one of: exact, mc.")

    logger.info("wiretap d₁ (%s, M=%d, L=%d): actual %.6g, worst-case %.6g",
                mode, M, L, result.actual, result.worst_case)
    return result


def wiretap_sandwich(channel: WiretapChannel, p, M: int, L: int, mode: str = "exact",
                     trials: int = 1000, seed: int = 0, limits: Limits = DEFAULT_LIMITS,
                     exponents: Optional[ExponentConfig] = None,
                     optimizer: Optional[OptimizerConfig] = None) -> WiretapSandwichReport:
    """d₁ against min(1, 2e^{−E_ach}) and max(0, 1 − 5e^{−E_conv}) at log L."""
    result = wiretap_d1(channel, p, M, L, mode, trials, seed, limits)
    sigma_xe = channel.induced_cq(p, "E")
    log_l = math.log(L)
    ach = wiretap_secrecy_exponent(sigma_xe, log_l, (1,), exponents, optimizer)
    conv = wiretap_converse_exponent(sigma_xe, log_l, (1,), exponents, optimizer)
    return WiretapSandwichReport(result=result, ach_exponent=ach.exponent,
                                 conv_exponent=conv.exponent, upper=ach.bounds[1],
                                 lower=conv.bounds[1])
