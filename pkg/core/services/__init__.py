"""
Core services: entropies, minimisation, exponents, bounds, simulation, verification, serialization.
"""
from .base_service import ExponentService, sup_alpha
from .bounds import converse_proof_step_bound, extractable_length, leftover_hash_bound, quantum_wiretap
from .exponents import (
    ea_achievability_bound, ea_converse_bound, ea_report, moderate_ea_table, moderate_table,
    pa_achievability_exponent, pa_converse_exponent, wiretap_converse_exponent,
    wiretap_error_exponent, wiretap_secrecy_exponent,
)
from .fixtures import FIXTURES, WIRETAP_FIXTURES, fixture_channel, fixture_state
from .minimizer import MinimizeResult, SandwichedCQObjective, minimize_sigma
from .renyi import (
    cond_var, conditional_entropy, divergence, h_down, i_down, mi_var, mutual_information,
    relative_entropy, relative_entropy_variance,
)
from .serialization_service import ResultSerializer
from .simulator import (
    exact_pa_distance, hash_distance, sampled_pa_distance, sandwich_check, sweep, wiretap_d1,
    wiretap_sandwich,
)
from .verifier import (
    check_additivity, check_concavity, check_derivatives, check_helstrom_attainment,
    check_monotone_and_limits, check_trace_inequality, run_battery,
)

__all__ = [
    'ExponentService',
    'sup_alpha',
    'converse_proof_step_bound',
    'extractable_length',
    'leftover_hash_bound',
    'quantum_wiretap',
    'ea_achievability_bound',
    'ea_converse_bound',
    'ea_report',
    'moderate_ea_table',
    'moderate_table',
    'pa_achievability_exponent',
    'pa_converse_exponent',
    'wiretap_converse_exponent',
    'wiretap_error_exponent',
    'wiretap_secrecy_exponent',
    'FIXTURES',
    'WIRETAP_FIXTURES',
    'fixture_channel',
    'fixture_state',
    'MinimizeResult',
    'SandwichedCQObjective',
    'minimize_sigma',
    'cond_var',
    'conditional_entropy',
    'divergence',
    'h_down',
    'i_down',
    'mi_var',
    'mutual_information',
    'relative_entropy',
    'relative_entropy_variance',
    'ResultSerializer',
    'exact_pa_distance',
    'hash_distance',
    'sampled_pa_distance',
    'sandwich_check',
    'sweep',
    'wiretap_d1',
    'wiretap_sandwich',
    'check_additivity',
    'check_concavity',
    'check_derivatives',
    'check_helstrom_attainment',
    'check_monotone_and_limits',
    'check_trace_inequality',
    'run_battery',
]
