"""Underlay cognitive NOMA with a full-duplex multi-antenna relay.

A cognitive source serves the strong cognitive user directly and the weak one
through a full-duplex relay, while the combined instantaneous interference at
the primary receiver must stay below a threshold. The optimum scheme pairs an
SINR-maximizing receive beam at the relay with a transmit beam that places
exact nulls on the primary receiver and the strong user; the suboptimum scheme
uses plain matched beams and leaks on both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..beamforming import Beamformer, mrc, mrt, mvdr, nullspace_mrt
from ..channel import ChannelSet, LinkSpec
from ..noma import PowerAllocation, RateOutcome, SicMessage, sic_chain, sinr

MODES = ("optimum", "suboptimum", "hd")

LN2 = math.log(2.0)


@dataclass(frozen=True)
class CognitiveConfig:
    p_s_max: float = 100.0
    p_r_max: float = 100.0
    i_th: float = 1.0
    n_t: int = 3
    n_r: int = 2
    alloc: PowerAllocation = field(default_factory=PowerAllocation)
    gain_cs_cu1: float = 1.0
    gain_cs_cr: float = 0.5
    gain_cr_cu2: float = 0.5
    gain_cr_cu1: float = 0.5
    gain_cs_pu: float = 0.2
    gain_cr_pu: float = 0.5
    gain_si: float = 0.3
    scheme: str = "optimum"
    enforce_decodability: bool = True

    def __post_init__(self):
        if self.scheme not in MODES:
            raise ValueError(f"unknown cognitive scheme {self.scheme!r}")
        if self.i_th < 0:
            raise ValueError("i_th must be >= 0")
        if self.p_s_max < 0 or self.p_r_max < 0:
            raise ValueError("power bounds must be >= 0")
        if self.n_t < 3:
            raise ValueError("optimum transmit nulling needs n_t >= 3")
        for name in ("gain_cs_cu1", "gain_cs_cr", "gain_cr_cu2", "gain_cr_cu1",
                     "gain_cs_pu", "gain_cr_pu", "gain_si"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def is_fd(self) -> bool:
        return self.scheme != "hd"

    def at_snr(self, snr: float) -> "CognitiveConfig":
        return replace(self, p_s_max=snr, p_r_max=snr)

    def with_mode(self, mode: str) -> "CognitiveConfig":
        return replace(self, scheme=mode)


def topology(cfg: CognitiveConfig) -> list[LinkSpec]:
    nt, nr = cfg.n_t, cfg.n_r
    return [
        LinkSpec("cs_cu1", 1, 1, cfg.gain_cs_cu1),
        LinkSpec("cs_cr", nr, 1, cfg.gain_cs_cr),
        LinkSpec("cr_cu2", 1, nt, cfg.gain_cr_cu2),
        LinkSpec("cr_cu1", 1, nt, cfg.gain_cr_cu1),
        LinkSpec("cs_pu", 1, 1, cfg.gain_cs_pu),
        LinkSpec("cr_pu", 1, nt, cfg.gain_cr_pu),
        LinkSpec("si", nr, nt, cfg.gain_si),
    ]


def scheme_beams(cfg: CognitiveConfig, ch: ChannelSet, p_s: float, p_r: float
                 ) -> tuple[Beamformer, Beamformer]:
    """(receive, transmit) beams for the configured scheme at the given powers."""
    h_sr = ch["cs_cr"].ravel()
    h_r2 = ch["cr_cu2"].ravel()
    if cfg.scheme == "suboptimum":
        return mrc(h_sr), mrt(h_r2)
    nulls = [ch["cr_pu"].ravel()]
    if cfg.scheme == "optimum":
        nulls.append(ch["cr_cu1"].ravel())
    w_t = nullspace_mrt(h_r2, nulls)
    v_si = ch["si"] @ w_t.weights
    si_scale = p_r if cfg.is_fd else 0.0
    cov = (np.eye(cfg.n_r, dtype=complex)
           + cfg.alloc.a1 * p_s * np.outer(h_sr, h_sr.conj())
           + si_scale * np.outer(v_si, v_si.conj()))
    return mvdr(h_sr, cov), w_t


@dataclass
class CognitiveOutcome:
    outcome: RateOutcome
    interference_at_pu: float
    feasible: bool


def eval_cognitive(cfg: CognitiveConfig, ch: ChannelSet, p_s: float, p_r: float,
                   beams: tuple[Beamformer, Beamformer]) -> CognitiveOutcome:
    """Audited evaluation at explicit powers and beams.

    Full-duplex schemes constrain the summed instantaneous interference at the
    primary receiver; the half-duplex scheme constrains each slot separately
    and reports the larger one.
    """
    if p_s > cfg.p_s_max + 1e-12 or p_r > cfg.p_r_max + 1e-12:
        raise ValueError("power bounds violated")
    if p_s < 0 or p_r < 0:
        raise ValueError("powers must be >= 0")
    a1, a2 = cfg.alloc.a1, cfg.alloc.a2
    w_r, w_t = beams
    fd = 1.0 if cfg.is_fd else 0.0
    half = 1.0 if cfg.is_fd else 0.5

    h_sr = ch["cs_cr"].ravel()
    g_s2 = abs(ch["cs_pu"][0, 0]) ** 2
    leak_pu = w_t.transmit_gain(ch["cr_pu"].ravel())
    leak_cu1 = w_t.transmit_gain(ch["cr_cu1"].ravel())
    gain_cu2 = w_t.transmit_gain(ch["cr_cu2"].ravel())
    h_s1 = abs(ch["cs_cu1"][0, 0]) ** 2
    v_si = ch["si"] @ w_t.weights

    i_slot_cs = p_s * g_s2
    i_slot_cr = p_r * leak_pu
    if cfg.is_fd:
        interference = i_slot_cs + i_slot_cr
    else:
        interference = max(i_slot_cs, i_slot_cr)
    feasible = interference <= cfg.i_th

    s_cr = sinr(a2 * p_s * w_r.receive_gain(h_sr),
                [("intra_noma", a1 * p_s * w_r.receive_gain(h_sr)),
                 ("self_interference", fd * p_r * w_r.receive_gain(v_si))], 1.0)
    s_cu2 = sinr(p_r * gain_cu2, [], 1.0)
    relay_interference = fd * p_r * leak_cu1
    s_cu1_x2 = sinr(a2 * p_s * h_s1,
                    [("intra_noma", a1 * p_s * h_s1),
                     ("relay", relay_interference)], 1.0)
    s_cu1_x1 = sinr(a1 * p_s * h_s1, [("relay", relay_interference)], 1.0)

    weak = SicMessage("weak", primary="cu2",
                      decoders={"cr": s_cr, "cu2": s_cu2})
    strong = SicMessage("strong", primary="cu1", decoders={"cu1": s_cu1_x1})
    out = sic_chain([weak, strong], enforce_decodability=cfg.enforce_decodability)
    out.breakdowns["weak"]["cu1_sic_margin"] = s_cu1_x2
    weak_limit = min(s_cr.value, s_cu2.value)
    out.sic_feasible["weak"] = s_cu1_x2.value >= weak_limit - 1e-15 * max(weak_limit, 1.0)
    if not cfg.is_fd:
        out.rates = {k: half * v for k, v in out.rates.items()}
    return CognitiveOutcome(out, interference_at_pu=interference, feasible=feasible)


def _power_grid(p_max: float, n: int) -> np.ndarray:
    if p_max <= 0:
        return np.array([0.0])
    return np.concatenate([[0.0], p_max * np.logspace(-4, 0, n - 1)])


def source_power_boundary(cfg: CognitiveConfig, ch: ChannelSet,
                          pr_grid: np.ndarray) -> np.ndarray:
    """Largest admissible source power per relay power.

    Both user rates are monotone in the source power at fixed relay power, so
    the optimum always sits on the interference boundary (or the power cap);
    adding these exact values to the search grid removes the source-power
    discretization error.
    """
    g_s2 = abs(ch["cs_pu"][0, 0]) ** 2
    _, w_t = scheme_beams(cfg, ch, 1.0, 1.0)
    leak = w_t.transmit_gain(ch["cr_pu"].ravel())
    if g_s2 <= 0:
        return np.array([cfg.p_s_max])
    if cfg.is_fd:
        ps = (cfg.i_th - pr_grid * leak) / g_s2
    else:
        ps = np.full_like(pr_grid, cfg.i_th / g_s2)
    return np.clip(ps, 0.0, cfg.p_s_max)


@dataclass
class GridEvaluation:
    """Vectorized rate/interference surfaces over a (p_s, p_r) grid."""

    p_s: np.ndarray
    p_r: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    interference: np.ndarray
    feasible_power: np.ndarray

    def best_for_target(self, i_th: float, r2_target: float):
        """(r1, flat index) of the feasible maximum, or (nan, -1).

        The threshold check carries a relative rounding slack so exact
        boundary power pairs are not rejected for a last-bit overshoot.
        """
        cap = i_th * (1.0 + 1e-12)
        mask = self.feasible_power & (self.interference <= cap) & (self.r2 >= r2_target - 1e-12)
        if not mask.any():
            return float("nan"), -1
        vals = np.where(mask, self.r1, -np.inf)
        idx = int(np.argmax(vals))
        return float(vals.flat[idx]), idx


def evaluate_power_grid(cfg: CognitiveConfig, ch: ChannelSet,
                        ps_grid: np.ndarray, pr_grid: np.ndarray) -> GridEvaluation:
    """Evaluate the configured scheme on the full power mesh in one pass.

    The receive beam is re-derived per grid point (its covariance depends on
    the powers); the transmit beam is power-independent. Uses closed 2x2
    algebra, matching the audited path to floating-point accuracy.
    """
    a1, a2 = cfg.alloc.a1, cfg.alloc.a2
    fd = cfg.is_fd
    half = 1.0 if fd else 0.5

    w_rx_probe, w_t = scheme_beams(cfg, ch, 1.0, 1.0)
    h_sr = ch["cs_cr"].ravel()
    v_si = ch["si"] @ w_t.weights
    g_s2 = abs(ch["cs_pu"][0, 0]) ** 2
    leak_pu = w_t.transmit_gain(ch["cr_pu"].ravel())
    leak_cu1 = w_t.transmit_gain(ch["cr_cu1"].ravel())
    gain_cu2 = w_t.transmit_gain(ch["cr_cu2"].ravel())
    h_s1 = abs(ch["cs_cu1"][0, 0]) ** 2

    PS, PR = np.meshgrid(ps_grid, pr_grid, indexing="ij")
    if fd:
        interference = PS * g_s2 + PR * leak_pu
    else:
        interference = np.maximum(PS * g_s2, PR * leak_pu)
    feasible_power = (PS <= cfg.p_s_max + 1e-12) & (PR <= cfg.p_r_max + 1e-12)

    si_scale = PR if fd else 0.0
    if cfg.scheme == "suboptimum":
        w = h_sr / np.linalg.norm(h_sr)
        sig = (a2 * PS) * abs(w.conj() @ h_sr) ** 2
        intra = (a1 * PS) * abs(w.conj() @ h_sr) ** 2
        si = si_scale * abs(w.conj() @ v_si) ** 2
        s_cr = sig / (intra + si + 1.0)
    else:
        # MVDR per grid point: R = I + a1 ps h h^H + [pr] v v^H, 2x2 closed form
        h0, h1 = h_sr[0], h_sr[1]
        v0, v1 = v_si[0], v_si[1]
        ra = 1.0 + a1 * PS * abs(h0) ** 2 + si_scale * abs(v0) ** 2
        rd = 1.0 + a1 * PS * abs(h1) ** 2 + si_scale * abs(v1) ** 2
        rb = a1 * PS * h0 * np.conj(h1) + si_scale * v0 * np.conj(v1)
        det = ra * rd - np.abs(rb) ** 2
        w0 = (rd * h0 - rb * h1) / det
        w1 = (ra * h1 - np.conj(rb) * h0) / det
        proj_h = np.conj(w0) * h0 + np.conj(w1) * h1
        proj_v = np.conj(w0) * v0 + np.conj(w1) * v1
        norm2 = np.abs(w0) ** 2 + np.abs(w1) ** 2
        sig = a2 * PS * np.abs(proj_h) ** 2
        intra = a1 * PS * np.abs(proj_h) ** 2
        si = si_scale * np.abs(proj_v) ** 2
        s_cr = sig / (intra + si + norm2)
    s_cu2 = PR * gain_cu2
    relay_i = (PR if fd else 0.0) * leak_cu1
    r2 = half * np.log1p(np.minimum(s_cr, s_cu2)) / LN2
    r1 = half * np.log1p(a1 * PS * h_s1 / (relay_i + 1.0)) / LN2
    return GridEvaluation(p_s=PS, p_r=PR, r1=r1, r2=r2,
                          interference=interference, feasible_power=feasible_power)
