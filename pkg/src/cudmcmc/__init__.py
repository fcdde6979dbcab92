"""MCMC driven by completely uniformly distributed (CUD) innovation streams."""

from .coupling import (CouplingRegion, contraction_probe, coupling_probe, mis_coupling_region,
                       rosenblatt_chentsov, slice_coupling_check)
from .discrepancy import cud_diagnostic, star_discrepancy
from .errors import (BudgetExceeded, ConfigError, CudMcmcError, DimensionMismatch,
                     DomainError, InvalidBound, InvalidState, StreamExhausted, TooShort)
from .generators import (gamma_quantile, inverse_rosenblatt, normal_quantile,
                         truncated_normal_inverse)
from .samplers import (ChainRun, IndependenceSampler, InversiveSliceSampler,
                       MetropolisHastings, RandomWalkMetropolis, SystematicScanGibbs,
                       UpdateFunction, run_chain)
from .streams import StreamSpec, make_stream, randomize

__all__ = [
    "BudgetExceeded", "ChainRun", "ConfigError", "CouplingRegion", "CudMcmcError",
    "DimensionMismatch", "DomainError", "IndependenceSampler", "InvalidBound", "InvalidState",
    "InversiveSliceSampler", "MetropolisHastings", "RandomWalkMetropolis", "StreamExhausted",
    "StreamSpec", "SystematicScanGibbs", "TooShort", "UpdateFunction", "contraction_probe",
    "coupling_probe", "cud_diagnostic", "gamma_quantile", "inverse_rosenblatt",
    "make_stream", "mis_coupling_region", "normal_quantile", "randomize", "rosenblatt_chentsov",
    "run_chain", "slice_coupling_check", "star_discrepancy", "truncated_normal_inverse",
]
