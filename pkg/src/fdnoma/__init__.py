"""Link-level Monte Carlo simulator and optimizer for full-duplex NOMA systems."""

__version__ = "0.1.0"

from .core import (RngStream, complex_gaussian_matrix, complex_gaussian_vector,
                   exp_integral_e1, hermitian_solve, project_onto_complement)
from .channel import ChannelSet, LinkSpec, draw_channel, draw_scenario_channels
from .noma import (PowerAllocation, RateOutcome, SicMessage, SinrBreakdown,
                   rate_from_sinr, sic_chain, sinr)
from .beamforming import Beamformer, mrc, mrt, mvdr, nullspace_mrt, zf_receive
from .scenarios import (CognitiveConfig, CoopConfig, RayleighConfig, ScbfConfig,
                        UldlConfig, eval_cognitive, eval_cooperative, eval_scbf,
                        eval_uldl)
from .sweep import (RateRegionPoint, SweepResult, ergodic_capacity,
                    power_grid_optimize, scbf_optimize, snr_sweep, tdm_region,
                    trace_rate_region)

__all__ = [
    "__version__",
    "RngStream", "complex_gaussian_vector", "complex_gaussian_matrix",
    "exp_integral_e1", "project_onto_complement", "hermitian_solve",
    "LinkSpec", "ChannelSet", "draw_channel", "draw_scenario_channels",
    "PowerAllocation", "SinrBreakdown", "SicMessage", "RateOutcome",
    "sinr", "rate_from_sinr", "sic_chain",
    "Beamformer", "mrt", "mrc", "zf_receive", "mvdr", "nullspace_mrt",
    "RayleighConfig", "CoopConfig", "UldlConfig", "CognitiveConfig", "ScbfConfig",
    "eval_uldl", "eval_cooperative", "eval_cognitive", "eval_scbf",
    "ergodic_capacity", "snr_sweep", "SweepResult",
    "power_grid_optimize", "trace_rate_region", "RateRegionPoint",
    "scbf_optimize", "tdm_region",
]
