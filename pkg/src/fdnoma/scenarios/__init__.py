"""Per-trial scenario evaluators and their configurations.

Each scenario module exposes a frozen config dataclass, a ``topology(cfg)``
link list, an audited single-trial evaluator returning a
:class:`~fdnoma.noma.RateOutcome`, and a trial-batched ``batch_sum_rate``
engine used by the sweep machinery. The audited and batched paths share the
same formulas; tests pin their equality.
"""

from .rayleigh import RayleighConfig, eval_rayleigh
from .cooperative import CoopConfig, eval_cooperative
from .uldl import UldlConfig, eval_uldl
from .cognitive import CognitiveConfig, CognitiveOutcome, eval_cognitive, scheme_beams
from .scbf import ScbfConfig, eval_scbf, scbf_channels

from . import rayleigh, cooperative, uldl, cognitive

SCENARIOS = {
    "rayleigh": rayleigh,
    "coop": cooperative,
    "uldl": uldl,
    "cognitive": cognitive,
}

CONFIG_TYPES = {
    "rayleigh": RayleighConfig,
    "coop": CoopConfig,
    "uldl": UldlConfig,
    "cognitive": CognitiveConfig,
    "scbf": ScbfConfig,
}

__all__ = [
    "SCENARIOS",
    "CONFIG_TYPES",
    "RayleighConfig",
    "CoopConfig",
    "UldlConfig",
    "CognitiveConfig",
    "CognitiveOutcome",
    "ScbfConfig",
    "eval_rayleigh",
    "eval_cooperative",
    "eval_uldl",
    "eval_cognitive",
    "eval_scbf",
    "scheme_beams",
    "scbf_channels",
]
