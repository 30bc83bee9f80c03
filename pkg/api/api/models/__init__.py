from .operator import DensityOperator, HermitianOperator, SpectralDecomposition
from .hashing import AffineHash, GFContext, HashFamily, UniversalityTable
from .cq_state import Codebook, CQState, KrausChannel, StinespringDilation, WiretapChannel
from .reports import (
    CheckReport, EABoundReport, EAParams, ExponentReport, LengthReport, ModerateRow,
    ModerateSchedule, ModerateTable, PAResult, SandwichReport, SweepRow, WiretapResult,
    WiretapSandwichReport,
)
