# tests/core_test/test_exponents.py
"""
Tests for the α-envelope exponents, entropy-accumulation bounds and
moderate-deviation tables.

Covers:
    • sup_alpha on the closed interval (grid + refinement)
    • Closed-form exponents on the bundled classical states
    • Clamping, raw bounds and the vacuous flag
    • Wiretap rate validation
    • Entropy-accumulation values and window boundaries
    • Moderate-deviation limits, zero variance, schedule validation
"""
import math

import pytest

from api.exceptions import DomainError, ValidationError
from api.models.reports import EAParams, ModerateSchedule
from api.types import ModerateKind
from services.base_service import sup_alpha
from services.exponents import (
    PAConverseExponent,
    ea_achievability_bound,
    ea_converse_bound,
    ea_report,
    moderate_ea_table,
    moderate_table,
    pa_achievability_exponent,
    pa_converse_exponent,
    wiretap_converse_exponent,
    wiretap_error_exponent,
    wiretap_secrecy_exponent,
)
from services.renyi import cond_var

LOG2 = math.log(2)


# ═════════════════════════════════════════════════════════════════
#  sup_alpha
# ═════════════════════════════════════════════════════════════════

class TestSupAlpha:

    def test_interior_maximum_refined(self):
        alpha, value = sup_alpha(lambda a: -(a - 1.3) ** 2, 1.0, 2.0, grid_points=16)
        assert alpha == pytest.approx(1.3, abs=1e-6)
        assert value == pytest.approx(0.0, abs=1e-10)

    def test_endpoint_maximum(self):
        alpha, value = sup_alpha(lambda a: a, 0.5, 1.0)
        assert alpha == pytest.approx(1.0)
        assert value == pytest.approx(1.0)

    def test_empty_interval(self):
        with pytest.raises(ValidationError):
            sup_alpha(lambda a: a, 1.0, 1.0)


# ═════════════════════════════════════════════════════════════════
#  Privacy-amplification exponents
# ═════════════════════════════════════════════════════════════════

class TestPAExponents:

    def test_converse_on_correlated_bit(self, correlated, coarse_exponents):
        report = pa_converse_exponent(correlated, LOG2, exponents=coarse_exponents)
        assert report.exponent == pytest.approx(LOG2, rel=1e-9)
        assert report.alpha_star == pytest.approx(0.5)
        assert report.threshold == pytest.approx(0.0, abs=1e-12)

    def test_converse_bounds_clamped(self, correlated, coarse_exponents):
        report = pa_converse_exponent(correlated, LOG2, n_list=(1, 4), exponents=coarse_exponents)
        assert report.raw_bounds[1] == pytest.approx(1 - 4 * 0.5)
        assert report.bounds[1] == 0.0
        assert report.bounds[4] == pytest.approx(1 - 4 * 2.0 ** -4)

    def test_achievability_on_uniform_bit(self, uniform, coarse_exponents):
        report = pa_achievability_exponent(uniform, 0.5 * LOG2, n_list=(3,),
                                           exponents=coarse_exponents)
        assert report.exponent == pytest.approx(0.25 * LOG2, rel=1e-9)
        assert report.alpha_star == pytest.approx(2.0)
        assert report.bounds[3] == pytest.approx(math.exp(-3 * 0.25 * LOG2))

    def test_achievability_above_entropy_is_vacuous(self, uniform, coarse_exponents):
        report = pa_achievability_exponent(uniform, 1.2 * LOG2, n_list=(5,),
                                           exponents=coarse_exponents)
        assert report.exponent == 0.0
        assert report.vacuous
        assert report.bounds[5] == 1.0
        assert report.to_dict()["vacuous"] is True

    def test_converse_below_entropy_is_vacuous(self, quarter, coarse_exponents):
        report = pa_converse_exponent(quarter, 0.1, exponents=coarse_exponents)
        assert report.exponent == 0.0

    def test_quarter_converse_positive_above_entropy(self, quarter, coarse_exponents):
        report = pa_converse_exponent(quarter, LOG2, exponents=coarse_exponents)
        assert report.exponent > 0
        assert 0.5 <= report.alpha_star <= 1.0

    def test_rate_must_be_finite(self, quarter):
        with pytest.raises(ValidationError):
            pa_converse_exponent(quarter, float("inf"))

    def test_report_dict_keys(self, correlated, coarse_exponents):
        data = pa_converse_exponent(correlated, LOG2, n_list=(2,),
                                    exponents=coarse_exponents).to_dict()
        assert data["kind"] == "pa_conv"
        assert set(data["bounds"]) == {"2"}
        assert "exponent" in data["raw"]


# ═════════════════════════════════════════════════════════════════
#  Wiretap exponents
# ═════════════════════════════════════════════════════════════════

class TestWiretapExponents:

    def test_secrecy_without_leakage(self, uniform, coarse_exponents):
        report = wiretap_secrecy_exponent(uniform, LOG2, n_list=(1,), exponents=coarse_exponents)
        assert report.exponent == pytest.approx(0.5 * LOG2, rel=1e-9)
        assert report.bounds[1] == pytest.approx(min(1.0, 2 * math.exp(-0.5 * LOG2)))

    def test_converse_on_full_leakage(self, correlated, coarse_exponents):
        report = wiretap_converse_exponent(correlated, 0.0, exponents=coarse_exponents)
        assert report.exponent == pytest.approx(LOG2, rel=1e-9)
        assert report.threshold == pytest.approx(LOG2)

    def test_error_exponent_prefactor(self, correlated, coarse_exponents):
        report = wiretap_error_exponent(correlated, 0.0, n_list=(2,), exponents=coarse_exponents)
        assert report.kind == "wt_err"
        assert report.raw_bounds[2] == pytest.approx(4 * math.exp(-2 * LOG2))

    def test_negative_log_l_rejected(self, correlated):
        with pytest.raises(ValidationError, match="≥ 0"):
            wiretap_converse_exponent(correlated, -0.1)


# ═════════════════════════════════════════════════════════════════
#  Entropy accumulation
# ═════════════════════════════════════════════════════════════════

class TestEntropyAccumulation:

    def test_converse_value(self):
        f = 0.3
        params = EAParams(f_w=f, V=2.5, prob_w=0.1, R=f + 0.5, n=1000)
        assert ea_converse_bound(params) == pytest.approx(1 - 40 * math.exp(-20), rel=1e-12)

    @pytest.mark.parametrize("gap", [0.0, -0.1, 2.5, 3.0])
    def test_converse_window(self, gap):
        with pytest.raises(DomainError):
            ea_converse_bound(EAParams(f_w=0.3, V=2.5, prob_w=0.1, R=0.3 + gap, n=10))

    def test_achievability_value(self):
        params = EAParams(f_w=1.0, V=2.5, prob_w=0.5, R=0.0, n=10)
        assert ea_achievability_bound(params) == pytest.approx(math.exp(-0.8) / 0.5)

    @pytest.mark.parametrize("slack", [0.0, 3.2])
    def test_achievability_window(self, slack):
        with pytest.raises(DomainError):
            ea_achievability_bound(EAParams(f_w=1.0, V=2.5, prob_w=0.5, R=1.0 - slack, n=10))

    def test_achievability_window_edge_included(self):
        params = EAParams(f_w=4.0, V=2.5, prob_w=1.0, R=4.0 - 3.125, n=1)
        assert ea_achievability_bound(params) > 0

    @pytest.mark.parametrize("kwargs", [dict(V=2.0), dict(prob_w=0.0), dict(prob_w=1.5), dict(n=-1)])
    def test_parameter_validation(self, kwargs):
        base = dict(f_w=0.3, V=2.5, prob_w=0.1, R=0.8, n=10)
        base.update(kwargs)
        with pytest.raises(ValidationError):
            EAParams(**base)

    def test_zero_rounds_is_vacuous(self):
        report = ea_report(EAParams(f_w=0.3, V=2.5, prob_w=0.1, R=0.8, n=0), "conv")
        assert report.raw == pytest.approx(1 - 40)
        assert report.value == 0.0
        assert report.vacuous

    def test_unknown_side(self):
        with pytest.raises(ValidationError):
            ea_report(EAParams(f_w=0.3, V=2.5, prob_w=0.1, R=0.8), "both")


# ═════════════════════════════════════════════════════════════════
#  Moderate deviations
# ═════════════════════════════════════════════════════════════════

class TestModerateDeviations:

    def test_schedule_validation(self):
        with pytest.raises(ValidationError):
            ModerateSchedule(0.5, (10, 100))
        with pytest.raises(ValidationError):
            ModerateSchedule(0.3, (100, 10))

    def test_pa_converse_limit(self, quarter):
        variance = cond_var(quarter)
        assert 1 / (2 * variance) == pytest.approx(2.209, abs=1e-3)
        table = moderate_table(quarter, ModerateKind.PA_CONV,
                               ModerateSchedule(0.3, (10 ** 4, 10 ** 6)))
        assert table.limit == pytest.approx(1 / (2 * variance))
        last = table.rows[-1]
        assert last.normalized_exponent == pytest.approx(table.limit, rel=0.15)
        assert last.rate == pytest.approx(table.threshold + last.a_n)

    def test_pa_achievability_limit(self, quarter):
        table = moderate_table(quarter, "pa_ach", ModerateSchedule(0.3, (10 ** 6,)))
        row = table.rows[0]
        assert row.rate == pytest.approx(table.threshold - row.a_n)
        assert row.normalized_exponent == pytest.approx(table.limit, rel=0.15)

    def test_normalized_exponent_in_log_space(self, quarter):
        table = moderate_table(quarter, "pa_conv", ModerateSchedule(0.3, (10 ** 6,)))
        row = table.rows[0]
        service = PAConverseExponent()
        exponent = row.normalized_exponent * row.n * row.a_n ** 2 + math.log(4)
        assert exponent / row.n == pytest.approx(
            service.execute(quarter, row.rate).exponent, rel=1e-9)

    def test_zero_variance_rejected(self, correlated):
        with pytest.raises(DomainError):
            moderate_table(correlated, "pa_conv", ModerateSchedule(0.3, (100,)))

    def test_entropy_accumulation_rows(self):
        schedule = ModerateSchedule(0.3, (10, 1000, 10 ** 6))
        table = moderate_ea_table(0.5, 2.5, 0.1, schedule, side="conv")
        assert table.limit == pytest.approx(1 / (2 * 2.5 ** 2))
        exponents = [row.normalized_exponent for row in table.rows]
        assert exponents == sorted(exponents)
        assert exponents[-1] < table.limit
        assert all(row.in_window for row in table.rows)
        assert table.rows[0].rate == pytest.approx(0.5 + 10 ** -0.3)

    def test_entropy_accumulation_window_flag(self):
        schedule = ModerateSchedule(0.1, (1, 10))
        table = moderate_ea_table(0.5, 2.5, 0.1, schedule, side="ach")
        assert all(row.in_window for row in table.rows)
        assert table.rows[0].rate == pytest.approx(0.5 - 1.0)
