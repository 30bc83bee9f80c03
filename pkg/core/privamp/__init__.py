"""
privamp: privacy-amplification bounds toolkit, platform package.

Public API:
    PlatformConfig      – top-level configuration
    OptimizerConfig     – σ_E minimizer settings
    ExponentConfig      – α-envelope settings
    SerializationConfig – output format and units
    VerifierConfig      – battery sizes

The command-line front end lives in ``privamp.cli``.
"""
from .config import (
    ExponentConfig,
    OptimizerConfig,
    PlatformConfig,
    SerializationConfig,
    VerifierConfig,
)

__all__ = [
    'PlatformConfig',
    'OptimizerConfig',
    'ExponentConfig',
    'SerializationConfig',
    'VerifierConfig',
]
