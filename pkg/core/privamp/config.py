"""
    Platform configuration: optimizer, exponent, serialization and verifier settings.

    Every knob is an explicit dataclass field; nothing is read from the
    environment.  Numeric tolerances and capacity limits live in
    ``api.tolerances`` and are aggregated here so one ``PlatformConfig``
    describes a complete run.
"""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict

from api.tolerances import DEFAULT_LIMITS, DEFAULT_TOLERANCES, Limits, Tolerances
from api.types import Units


@dataclass
class OptimizerConfig:
    """
    Settings of the σ_E minimizer.

    Attributes:
        tol:        Stationarity residual at which a start is accepted.
        max_iters:  Iteration budget per start.
        starts:     Number of deterministic starting points (≥ 2: ρ_E and 1/d are always used).
        seed:       Seed for the random starts.
        step:       Initial mirror-descent step size.
    """
    tol: float = 1e-7
    max_iters: int = 2000
    starts: int = 5
    seed: int = 0
    step: float = 1.0


@dataclass
class ExponentConfig:
    """
    Settings of the α-envelope maximisation.

    Attributes:
        grid_points: Uniform grid size on the closed α-interval.
        alpha_tol:   Width to which the best grid cell is refined.
    """
    grid_points: int = 512
    alpha_tol: float = 1e-9


@dataclass
class SerializationConfig:
    """
    Controls the shape of emitted results.

    Attributes:
        format:             ``json`` or ``csv``.
        units:              Display units for rates, exponents and entropies.
        significant_digits: Digits used for CSV floats.
        include_breakdown:  Whether per-hash distances are embedded in simulation output.
    """
    format: str = "json"
    units: Units = Units.NATS
    significant_digits: int = 17
    include_breakdown: bool = False


@dataclass
class VerifierConfig:
    """
    Default battery sizes.

    Attributes:
        trace_trials:      Random pairs for the trace inequality.
        trace_dims:        Dimensions cycled through by the trace inequality.
        concavity_trials:  Random ensemble pairs for the concavity check.
        helstrom_trials:   Random pairs for the Helstrom attainment check.
    """
    trace_trials: int = 10_000
    trace_dims: tuple = (2, 3, 4, 5, 6)
    concavity_trials: int = 1_000
    helstrom_trials: int = 1_000


@dataclass
class PlatformConfig:
    """
    Top-level configuration.

    Attributes:
        optimizer:     Minimizer settings.
        exponents:     α-envelope settings.
        serialization: Output settings.
        verifier:      Battery sizes.
        tolerances:    Numeric tolerances (validation, support cutoff, α = 1 band).
        limits:        Capacity limits for explicit tensors and enumerations.
        threads:       Worker count for concurrent sweeps; 0 means the executor default.
        seed:          Default seed for sampled computations.
    """
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    exponents: ExponentConfig = field(default_factory=ExponentConfig)
    serialization: SerializationConfig = field(default_factory=SerializationConfig)
    verifier: VerifierConfig = field(default_factory=VerifierConfig)
    tolerances: Tolerances = field(default_factory=lambda: DEFAULT_TOLERANCES)
    limits: Limits = field(default_factory=lambda: DEFAULT_LIMITS)
    threads: int = 0
    seed: int = 0

    @property
    def max_workers(self):
        """``None`` lets ``ThreadPoolExecutor`` choose."""
        return self.threads if self.threads > 0 else None

    def to_dict(self) -> Dict[str, Any]:
        """Resolved configuration as plain values (for provenance blocks)."""
        data = asdict(self)
        data["serialization"]["units"] = self.serialization.units.value
        data["verifier"]["trace_dims"] = list(self.verifier.trace_dims)
        return data
