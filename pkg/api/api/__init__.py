"""
Privacy amplification API: operator and state models, GF(2^u) hashing,
result records and the error taxonomy.
"""
from .exceptions import CapacityError, ConvergenceError, DomainError, PrivampError, ValidationError
from .types import (
    BoundSide, DivergenceKind, EntropyKind, ModerateKind, MutualInfoKind, TypeValidator, Units,
    ValueType,
)
from .models import (
    AffineHash, CheckReport, Codebook, CQState, DensityOperator, EABoundReport, EAParams,
    ExponentReport, GFContext, HashFamily, HermitianOperator, KrausChannel, LengthReport,
    ModerateRow, ModerateSchedule, ModerateTable, PAResult, SandwichReport,
    SpectralDecomposition, StinespringDilation, SweepRow, UniversalityTable, WiretapChannel,
    WiretapResult, WiretapSandwichReport,
)
from . import linalg

__all__ = [
    'PrivampError', 'ValidationError', 'CapacityError', 'ConvergenceError', 'DomainError',
    'BoundSide', 'DivergenceKind', 'EntropyKind', 'ModerateKind', 'MutualInfoKind',
    'TypeValidator', 'Units', 'ValueType',
    'HermitianOperator', 'DensityOperator', 'SpectralDecomposition',
    'GFContext', 'AffineHash', 'HashFamily', 'UniversalityTable',
    'CQState', 'WiretapChannel', 'Codebook', 'KrausChannel', 'StinespringDilation',
    'ExponentReport', 'EAParams', 'EABoundReport', 'ModerateSchedule', 'ModerateRow',
    'ModerateTable', 'LengthReport', 'PAResult', 'SandwichReport', 'SweepRow',
    'WiretapResult', 'WiretapSandwichReport', 'CheckReport',
    'linalg',
]
