"""Uplink/downlink cellular NOMA with a full-duplex multi-antenna base station.

The BS transmits per-user superposition-coded beams to a downlink pair while
receiving from an uplink pair on the same resource. Full-duplex modes carry
the BS self-interference and the uplink-to-downlink inter-user interference;
the half-duplex baseline runs the same formulas with those terms zeroed and
every rate halved for the slot split. Multi-cell operation adds one aggregate
co-channel interference term per receiver, scaled by the downlink SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..beamforming import mrc, mrt, zf_receive
from ..channel import ChannelSet, LinkSpec
from ..core import NullSpaceExhaustedError
from ..noma import PowerAllocation, RateOutcome, SicMessage, sic_chain, sinr

MODES = ("fd_zf", "fd_mrc", "hd")

LN2 = math.log(2.0)


@dataclass(frozen=True)
class UldlConfig:
    """Cellular uplink/downlink pair configuration.

    Uplink transmit SNRs default to the downlink SNR shifted by
    uplink_snr_offset_db, reflecting the terminal/base-station power
    asymmetry. cci_factor scales the per-neighbor co-channel interference
    relative to the downlink SNR; zero means single cell.
    """

    rho_b: float = 10.0
    p_u1: float | None = None
    p_u2: float | None = None
    uplink_snr_offset_db: float = -11.0
    sigma2_si: float = 0.1
    n_t: int = 3
    n_r: int = 2
    alloc: PowerAllocation = field(default_factory=PowerAllocation)
    gain_bs_d1: float = 1.0
    gain_bs_d2: float = 0.2
    gain_u1_bs: float = 1.0
    gain_u2_bs: float = 0.2
    gain_u1_d1: float = 0.1
    gain_u1_d2: float = 0.1
    gain_u2_d1: float = 0.1
    gain_u2_d2: float = 0.1
    cci_factor: float = 0.0
    n_neighbor_cells: int = 6
    mode: str = "fd_zf"
    shared_dl_beam: bool = False  # one beam matched to the weak user's channel
    enforce_decodability: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown uldl mode {self.mode!r}")
        if self.n_t < 1 or self.n_r < 1:
            raise ValueError("antenna counts must be positive")
        if self.mode == "fd_zf" and self.n_r < 2:
            raise ValueError("fd_zf needs n_r >= 2 to place a null")
        if self.cci_factor < 0:
            raise ValueError("cci_factor must be >= 0")
        if self.n_neighbor_cells < 0:
            raise ValueError("n_neighbor_cells must be >= 0")
        if self.sigma2_si < 0:
            raise ValueError("sigma2_si must be >= 0")
        for name in ("gain_bs_d1", "gain_bs_d2", "gain_u1_bs", "gain_u2_bs",
                     "gain_u1_d1", "gain_u1_d2", "gain_u2_d1", "gain_u2_d2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def uplink_snrs(self) -> tuple[float, float]:
        fallback = self.rho_b * 10.0 ** (self.uplink_snr_offset_db / 10.0)
        return (fallback if self.p_u1 is None else self.p_u1,
                fallback if self.p_u2 is None else self.p_u2)

    @property
    def cci_power(self) -> float:
        """Aggregate co-channel interference power per unit source SNR."""
        return self.cci_factor * self.n_neighbor_cells

    @property
    def is_fd(self) -> bool:
        return self.mode != "hd"

    def at_snr(self, snr: float) -> "UldlConfig":
        return replace(self, rho_b=snr)

    def with_mode(self, mode: str) -> "UldlConfig":
        return replace(self, mode=mode)


def topology(cfg: UldlConfig) -> list[LinkSpec]:
    nt, nr = cfg.n_t, cfg.n_r
    return [
        LinkSpec("bs_d1", 1, nt, cfg.gain_bs_d1),
        LinkSpec("bs_d2", 1, nt, cfg.gain_bs_d2),
        LinkSpec("u1_bs", nr, 1, cfg.gain_u1_bs),
        LinkSpec("u2_bs", nr, 1, cfg.gain_u2_bs),
        LinkSpec("u1_d1", 1, 1, cfg.gain_u1_d1),
        LinkSpec("u1_d2", 1, 1, cfg.gain_u1_d2),
        LinkSpec("u2_d1", 1, 1, cfg.gain_u2_d1),
        LinkSpec("u2_d2", 1, 1, cfg.gain_u2_d2),
        LinkSpec("si", nr, nt, cfg.sigma2_si),
        LinkSpec("cci_d1", 1, 1, cfg.cci_power),
        LinkSpec("cci_d2", 1, 1, cfg.cci_power),
        LinkSpec("cci_bs", nr, 1, cfg.cci_power),
    ]


def _uplink_order(cfg: UldlConfig) -> tuple[str, str]:
    """Decode the stronger uplink user first; ties break by label."""
    pairs = sorted([("u1", cfg.gain_u1_bs), ("u2", cfg.gain_u2_bs)],
                   key=lambda kv: (-kv[1], kv[0]))
    return pairs[0][0], pairs[1][0]


def eval_uldl(cfg: UldlConfig, ch: ChannelSet) -> RateOutcome:
    """Audited single-trial evaluation returning all four user rates."""
    a1, a2 = cfg.alloc.a1, cfg.alloc.a2
    rho = cfg.rho_b
    p_u = dict(zip(("u1", "u2"), cfg.uplink_snrs))
    fd = 1.0 if cfg.is_fd else 0.0
    half = 1.0 if cfg.is_fd else 0.5

    h_d1 = ch["bs_d1"].ravel()
    h_d2 = ch["bs_d2"].ravel()
    g_ul = {"u1": ch["u1_bs"].ravel(), "u2": ch["u2_bs"].ravel()}
    h_si = ch["si"]
    cci = cfg.rho_b  # dominant out-of-cell source transmits at the downlink SNR

    w2 = mrt(h_d2)
    w1 = w2 if cfg.shared_dl_beam else mrt(h_d1)
    si_beam = {"a1": h_si @ w1.weights, "a2": h_si @ w2.weights}

    def dl_interference(user: str) -> list[tuple[str, float]]:
        ud = fd * (p_u["u1"] * abs(ch[f"u1_{user}"][0, 0]) ** 2
                   + p_u["u2"] * abs(ch[f"u2_{user}"][0, 0]) ** 2)
        return [("uplink_users", ud),
                ("cci", cci * abs(ch[f"cci_{user}"][0, 0]) ** 2)]

    s_weak_at_d2 = sinr(a2 * rho * w2.transmit_gain(h_d2),
                        [("intra_noma", a1 * rho * w1.transmit_gain(h_d2))]
                        + dl_interference("d2"), 1.0)
    s_weak_at_d1 = sinr(a2 * rho * w2.transmit_gain(h_d1),
                        [("intra_noma", a1 * rho * w1.transmit_gain(h_d1))]
                        + dl_interference("d1"), 1.0)
    s_strong_at_d1 = sinr(a1 * rho * w1.transmit_gain(h_d1),
                          dl_interference("d1"), 1.0)
    dl_weak = SicMessage("dl_weak", primary="d2",
                         decoders={"d2": s_weak_at_d2, "d1": s_weak_at_d1},
                         optional=("d1",))
    dl_strong = SicMessage("dl_strong", primary="d1", decoders={"d1": s_strong_at_d1})

    def rx_beam(target: np.ndarray):
        if cfg.mode == "fd_zf":
            try:
                return zf_receive(target, [si_beam["a2"]])
            except NullSpaceExhaustedError:
                return mrc(target)
        return mrc(target)

    def bs_side_terms(w) -> list[tuple[str, float]]:
        si = fd * rho * (a1 * w.receive_gain(si_beam["a1"])
                         + a2 * w.receive_gain(si_beam["a2"]))
        return [("self_interference", si),
                ("cci", cci * w.receive_gain(ch["cci_bs"].ravel()))]

    first, second = _uplink_order(cfg)
    w_first = rx_beam(g_ul[first])
    w_second = rx_beam(g_ul[second])
    s_first = sinr(p_u[first] * w_first.receive_gain(g_ul[first]),
                   [("intra_noma", p_u[second] * w_first.receive_gain(g_ul[second]))]
                   + bs_side_terms(w_first), 1.0)
    s_second = sinr(p_u[second] * w_second.receive_gain(g_ul[second]),
                    bs_side_terms(w_second), 1.0)
    ul_first = SicMessage(f"ul_{first}", primary="bs", decoders={"bs": s_first})
    ul_second = SicMessage(f"ul_{second}", primary="bs", decoders={"bs": s_second})

    out = sic_chain([dl_weak, dl_strong, ul_first, ul_second],
                    enforce_decodability=cfg.enforce_decodability)
    if not cfg.is_fd:
        out.rates = {k: half * v for k, v in out.rates.items()}
    return out


def batch_rates(cfg: UldlConfig, batch: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Vectorized per-user rates; same formulas as :func:`eval_uldl`."""
    a1, a2 = cfg.alloc.a1, cfg.alloc.a2
    rho = cfg.rho_b
    p_u = dict(zip(("u1", "u2"), cfg.uplink_snrs))
    fd = 1.0 if cfg.is_fd else 0.0
    half = 1.0 if cfg.is_fd else 0.5
    cci = cfg.rho_b

    def unit(x):
        return x / np.linalg.norm(x, axis=-1, keepdims=True)

    h_d1 = batch["bs_d1"][:, 0, :]
    h_d2 = batch["bs_d2"][:, 0, :]
    g_ul = {"u1": batch["u1_bs"][:, :, 0], "u2": batch["u2_bs"][:, :, 0]}
    w2 = unit(h_d2.conj())
    w1 = w2 if cfg.shared_dl_beam else unit(h_d1.conj())

    def tgain(h, w):
        return np.abs(np.einsum("ij,ij->i", h, w)) ** 2

    def rgain(w, g):
        return np.abs(np.einsum("ij,ij->i", w.conj(), g)) ** 2

    def dl_noise(user):
        ud = fd * (p_u["u1"] * np.abs(batch[f"u1_{user}"][:, 0, 0]) ** 2
                   + p_u["u2"] * np.abs(batch[f"u2_{user}"][:, 0, 0]) ** 2)
        return ud + cci * np.abs(batch[f"cci_{user}"][:, 0, 0]) ** 2 + 1.0

    i_d1 = dl_noise("d1")
    i_d2 = dl_noise("d2")
    s_weak_d2 = a2 * rho * tgain(h_d2, w2) / (a1 * rho * tgain(h_d2, w1) + i_d2)
    s_weak_d1 = a2 * rho * tgain(h_d1, w2) / (a1 * rho * tgain(h_d1, w1) + i_d1)
    s_strong = a1 * rho * tgain(h_d1, w1) / i_d1
    weak_lim = np.minimum(s_weak_d2, s_weak_d1) if cfg.enforce_decodability else s_weak_d2

    v_a1 = np.einsum("ijk,ik->ij", batch["si"], w1)
    v_a2 = np.einsum("ijk,ik->ij", batch["si"], w2)

    def rx(g):
        if cfg.mode == "fd_zf":
            num = np.einsum("ij,ij->i", v_a2.conj(), g)
            den = np.einsum("ij,ij->i", v_a2.conj(), v_a2).real
            p = g - v_a2 * (num / np.maximum(den, 1e-300))[:, None]
            return unit(p)
        return unit(g)

    def bs_noise(w):
        si = fd * rho * (a1 * rgain(w, v_a1) + a2 * rgain(w, v_a2))
        return si + cci * rgain(w, batch["cci_bs"][:, :, 0]) + 1.0

    first, second = _uplink_order(cfg)
    w_f = rx(g_ul[first])
    w_s = rx(g_ul[second])
    s_first = p_u[first] * rgain(w_f, g_ul[first]) / (
        p_u[second] * rgain(w_f, g_ul[second]) + bs_noise(w_f))
    s_second = p_u[second] * rgain(w_s, g_ul[second]) / bs_noise(w_s)

    rates = {
        "dl_weak": half * np.log1p(weak_lim) / LN2,
        "dl_strong": half * np.log1p(s_strong) / LN2,
        f"ul_{first}": half * np.log1p(s_first) / LN2,
        f"ul_{second}": half * np.log1p(s_second) / LN2,
    }
    return rates


def batch_sum_rate(cfg: UldlConfig, batch: dict[str, np.ndarray]) -> np.ndarray:
    rates = batch_rates(cfg, batch)
    return sum(rates.values())
