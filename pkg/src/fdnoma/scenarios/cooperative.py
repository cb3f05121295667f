"""Dual-user cooperative NOMA: a base station serves a strong user directly
while a full-duplex helper (dedicated relay, or the strong user itself)
forwards the weak user's message.

Four variants share one formula engine: the half-duplex ones evaluate the
full-duplex expressions with every residual-interference term zeroed and the
rates halved for the extra slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..channel import ChannelSet, LinkSpec
from ..noma import PowerAllocation, RateOutcome, SicMessage, sic_chain, sinr

MODES = ("fd_relay", "hd_relay", "fd_user", "hd_user")

LN2 = math.log(2.0)


@dataclass(frozen=True)
class CoopConfig:
    """Cooperative-pair configuration.

    Average link gains already include any self-interference cancellation:
    loop_gain is the post-cancellation residual strength of the forwarder's
    loop channel. The residual fractions k1 (at the strong user, for the
    forwarder's known signal) and k2 (at the forwarder, for its own loop)
    default to 1.0, i.e. the gains alone set the residual levels.
    """

    rho_b: float = 10.0
    rho_r: float | None = None  # forwarding SNR; defaults to rho_b / 2
    alloc: PowerAllocation = field(default_factory=PowerAllocation)
    gain_bs_ue1: float = 1.0
    gain_bs_relay: float = 0.5
    gain_relay_ue1: float = 0.5
    gain_relay_ue2: float = 0.5
    loop_gain: float = 0.3
    gain_bs_ue2: float = 0.1  # direct link, used by the user-assisted variants
    k1: float = 1.0
    k2: float = 1.0
    variant: str = "fd_relay"
    enforce_decodability: bool = True

    def __post_init__(self):
        if self.variant not in MODES:
            raise ValueError(f"unknown cooperative variant {self.variant!r}")
        if not (0.0 <= self.k1 <= 1.0) or not (0.0 <= self.k2 <= 1.0):
            raise ValueError("k1 and k2 must lie in [0, 1]")
        if self.rho_b < 0:
            raise ValueError("rho_b must be >= 0")
        if self.rho_r is not None and self.rho_r <= 0:
            raise ValueError("rho_r must be > 0")
        for name in ("gain_bs_ue1", "gain_bs_relay", "gain_relay_ue1",
                     "gain_relay_ue2", "loop_gain", "gain_bs_ue2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def forward_snr(self) -> float:
        return self.rho_b / 2.0 if self.rho_r is None else self.rho_r

    @property
    def is_fd(self) -> bool:
        return self.variant.startswith("fd")

    def at_snr(self, snr: float) -> "CoopConfig":
        return replace(self, rho_b=snr)

    def with_mode(self, mode: str) -> "CoopConfig":
        return replace(self, variant=mode)


def topology(cfg: CoopConfig) -> list[LinkSpec]:
    # One topology for all variants keeps channel sets identical across modes.
    return [
        LinkSpec("bs_ue1", 1, 1, cfg.gain_bs_ue1),
        LinkSpec("bs_relay", 1, 1, cfg.gain_bs_relay),
        LinkSpec("relay_ue1", 1, 1, cfg.gain_relay_ue1),
        LinkSpec("relay_ue2", 1, 1, cfg.gain_relay_ue2),
        LinkSpec("loop", 1, 1, cfg.loop_gain),
        LinkSpec("bs_ue2", 1, 1, cfg.gain_bs_ue2),
        LinkSpec("ue1_ue2", 1, 1, cfg.gain_relay_ue2),
    ]


def _gains(ch) -> dict[str, float]:
    return {label: float(np.abs(ch[label]).ravel()[0] ** 2) for label in
            ("bs_ue1", "bs_relay", "relay_ue1", "relay_ue2", "loop", "bs_ue2", "ue1_ue2")}


def eval_cooperative(cfg: CoopConfig, ch: ChannelSet) -> RateOutcome:
    """Audited single-trial evaluation of the configured variant."""
    g = _gains(ch)
    a1, a2 = cfg.alloc.a1, cfg.alloc.a2
    rho, rho_r = cfg.rho_b, cfg.forward_snr
    fd = 1.0 if cfg.is_fd else 0.0
    half = 1.0 if cfg.is_fd else 0.5

    if cfg.variant.endswith("relay"):
        loop_res = fd * cfg.k2 * rho_r * g["loop"]
        ue1_res = fd * cfg.k1 * rho_r * g["relay_ue1"]
        s_relay = sinr(a2 * rho * g["bs_relay"],
                       [("intra_noma", a1 * rho * g["bs_relay"]),
                        ("loop_residual", loop_res)], 1.0)
        s_ue2 = sinr(rho_r * g["relay_ue2"], [], 1.0)
        s_ue1_x2 = sinr(a2 * rho * g["bs_ue1"],
                        [("intra_noma", a1 * rho * g["bs_ue1"]),
                         ("forwarder_residual", ue1_res)], 1.0)
        s_ue1_x1 = sinr(a1 * rho * g["bs_ue1"],
                        [("forwarder_residual", ue1_res)], 1.0)
        weak = SicMessage("weak", primary="ue2",
                          decoders={"relay": s_relay, "ue2": s_ue2, "ue1": s_ue1_x2},
                          optional=("ue1",))
    else:  # user-assisted: UE1 forwards over the direct-plus-forwarded pair
        loop_res = fd * cfg.k2 * rho_r * g["loop"]
        s_ue1_x2 = sinr(a2 * rho * g["bs_ue1"],
                        [("intra_noma", a1 * rho * g["bs_ue1"]),
                         ("loop_residual", loop_res)], 1.0)
        s_ue1_x1 = sinr(a1 * rho * g["bs_ue1"], [("loop_residual", loop_res)], 1.0)
        s_direct = sinr(a2 * rho * g["bs_ue2"],
                        [("intra_noma", a1 * rho * g["bs_ue2"])], 1.0)
        s_forward = sinr(rho_r * g["ue1_ue2"], [], 1.0)
        # the two copies combine by SINR addition; keep both branches auditable
        s_ue2 = sinr(s_direct.value + s_forward.value, [], 1.0)
        weak = SicMessage("weak", primary="ue2",
                          decoders={"ue1": s_ue1_x2, "ue2": s_ue2},
                          optional=())
    strong = SicMessage("strong", primary="ue1", decoders={"ue1": s_ue1_x1})
    out = sic_chain([weak, strong], enforce_decodability=cfg.enforce_decodability)
    if not cfg.is_fd:
        out.rates = {k: half * v for k, v in out.rates.items()}
    if cfg.variant.endswith("user"):
        out.breakdowns["weak"]["ue2_direct"] = s_direct
        out.breakdowns["weak"]["ue2_forward"] = s_forward
    return out


def batch_sum_rate(cfg: CoopConfig, batch: dict[str, np.ndarray]) -> np.ndarray:
    """Vectorized per-trial sum rates; identical formulas to the audited path."""
    g = {k: np.abs(v[:, 0, 0]) ** 2 for k, v in batch.items()}
    a1, a2 = cfg.alloc.a1, cfg.alloc.a2
    rho, rho_r = cfg.rho_b, cfg.forward_snr
    fd = 1.0 if cfg.is_fd else 0.0
    half = 1.0 if cfg.is_fd else 0.5

    if cfg.variant.endswith("relay"):
        loop_res = fd * cfg.k2 * rho_r * g["loop"]
        ue1_res = fd * cfg.k1 * rho_r * g["relay_ue1"]
        s_relay = a2 * rho * g["bs_relay"] / (a1 * rho * g["bs_relay"] + loop_res + 1.0)
        s_ue2 = rho_r * g["relay_ue2"]
        s_ue1_x2 = a2 * rho * g["bs_ue1"] / (a1 * rho * g["bs_ue1"] + ue1_res + 1.0)
        s_ue1_x1 = a1 * rho * g["bs_ue1"] / (ue1_res + 1.0)
        worst = np.minimum(s_relay, s_ue2)
        if cfg.enforce_decodability:
            worst = np.minimum(worst, s_ue1_x2)
    else:
        loop_res = fd * cfg.k2 * rho_r * g["loop"]
        s_ue1_x2 = a2 * rho * g["bs_ue1"] / (a1 * rho * g["bs_ue1"] + loop_res + 1.0)
        s_ue1_x1 = a1 * rho * g["bs_ue1"] / (loop_res + 1.0)
        s_ue2 = (a2 * rho * g["bs_ue2"] / (a1 * rho * g["bs_ue2"] + 1.0)
                 + rho_r * g["ue1_ue2"])
        # the forwarder must decode the weak message regardless of the min rule
        worst = np.minimum(s_ue1_x2, s_ue2)
    r_weak = np.log1p(worst) / LN2
    r_strong = np.log1p(s_ue1_x1) / LN2
    return half * (r_weak + r_strong)
