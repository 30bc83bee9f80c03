# tests/core_test/test_config.py
"""
Tests for PlatformConfig and its sections.

Covers:
    • Default values of every section
    • max_workers derived from threads
    • to_dict provenance block (plain values only)
    • Independence of default instances
"""
import json

from api.tolerances import DEFAULT_LIMITS, DEFAULT_TOLERANCES
from api.types import Units
from privamp.config import (
    ExponentConfig,
    OptimizerConfig,
    PlatformConfig,
    SerializationConfig,
    VerifierConfig,
)


# ═════════════════════════════════════════════════════════════════
#  Section defaults
# ═════════════════════════════════════════════════════════════════

class TestSectionDefaults:

    def test_optimizer_defaults(self):
        cfg = OptimizerConfig()
        assert cfg.tol == 1e-7
        assert cfg.max_iters == 2000
        assert cfg.starts >= 2

    def test_exponent_grid_is_512(self):
        assert ExponentConfig().grid_points == 512

    def test_serialization_defaults_to_json_in_nats(self):
        cfg = SerializationConfig()
        assert cfg.format == "json"
        assert cfg.units is Units.NATS
        assert cfg.include_breakdown is False

    def test_verifier_default_trial_counts(self):
        cfg = VerifierConfig()
        assert cfg.trace_trials == 10_000
        assert cfg.concavity_trials == 1_000
        assert cfg.helstrom_trials == 1_000
        assert tuple(cfg.trace_dims) == (2, 3, 4, 5, 6)


# ═════════════════════════════════════════════════════════════════
#  PlatformConfig wiring
# ═════════════════════════════════════════════════════════════════

class TestPlatformConfig:

    def test_defaults_share_module_tolerances(self):
        cfg = PlatformConfig()
        assert cfg.tolerances == DEFAULT_TOLERANCES
        assert cfg.limits == DEFAULT_LIMITS

    def test_zero_threads_means_executor_default(self):
        assert PlatformConfig().max_workers is None

    def test_positive_threads_passed_through(self):
        assert PlatformConfig(threads=3).max_workers == 3

    def test_sections_are_not_shared_between_instances(self):
        a, b = PlatformConfig(), PlatformConfig()
        a.optimizer.tol = 1e-3
        assert b.optimizer.tol == 1e-7


# ═════════════════════════════════════════════════════════════════
#  to_dict
# ═════════════════════════════════════════════════════════════════

class TestToDict:

    def test_units_rendered_as_string(self):
        cfg = PlatformConfig(serialization=SerializationConfig(units=Units.BITS))
        assert cfg.to_dict()["serialization"]["units"] == "bits"

    def test_json_serializable(self):
        data = PlatformConfig(seed=7).to_dict()
        restored = json.loads(json.dumps(data))
        assert restored["seed"] == 7
        assert restored["verifier"]["trace_dims"] == [2, 3, 4, 5, 6]

    def test_contains_every_section(self):
        data = PlatformConfig().to_dict()
        for key in ("optimizer", "exponents", "serialization", "verifier",
                    "tolerances", "limits", "threads", "seed"):
            assert key in data
