"""Single-user Rayleigh reference scenario.

One unit-gain link, rate log2(1 + snr*|h|^2). Its ergodic capacity has the
closed form exp(1/snr)*E1(1/snr)/ln(2), which anchors the Monte Carlo
machinery against an analytic oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..channel import ChannelSet, LinkSpec
from ..core import exp_integral_e1
from ..noma import RateOutcome, SicMessage, sic_chain, sinr

MODES = ("default",)


@dataclass(frozen=True)
class RayleighConfig:
    snr: float = 1.0
    avg_gain: float = 1.0
    mode: str = "default"

    def __post_init__(self):
        if self.snr < 0 or self.avg_gain < 0:
            raise ValueError("snr and avg_gain must be >= 0")

    def at_snr(self, snr: float) -> "RayleighConfig":
        return replace(self, snr=snr)

    def with_mode(self, mode: str) -> "RayleighConfig":
        if mode not in MODES:
            raise ValueError(f"unknown rayleigh mode {mode!r}")
        return self


def topology(cfg: RayleighConfig) -> list[LinkSpec]:
    return [LinkSpec("link", 1, 1, cfg.avg_gain)]


def eval_rayleigh(cfg: RayleighConfig, ch: ChannelSet) -> RateOutcome:
    gain = float(np.abs(ch["link"][0, 0]) ** 2)
    s = sinr(cfg.snr * gain, [], 1.0)
    return sic_chain([SicMessage("x", "rx", {"rx": s})])


def batch_sum_rate(cfg: RayleighConfig, batch: dict[str, np.ndarray]) -> np.ndarray:
    gain = np.abs(batch["link"][:, 0, 0]) ** 2
    return np.log1p(cfg.snr * gain) / math.log(2.0)


def analytic_ergodic_capacity(snr: float) -> float:
    """E[log2(1 + snr*|h|^2)] for |h|^2 ~ Exp(1)."""
    if snr <= 0:
        return 0.0
    x = 1.0 / snr
    return math.exp(x) * exp_integral_e1(x) / math.log(2.0)
