"""Two-user downlink beamforming with superposition coding on deterministic
channels.

The channel pair is built from an asymmetry factor (power attenuation of the
weaker channel) and a spatial correlation coefficient: the weaker channel's
unit direction has inner product rho_corr with the stronger one. Both message
beams live in the span of the two channels; rates follow from superposition
coding with the interference either cancelled (SIC, at either user) or
treated as noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ScbfConfig:
    m: int = 2
    p_total: float = 10.0
    alpha: float = 1.0
    rho_corr: float = 0.0
    grid_resolution: int = 32
    refinements: int = 2

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("need at least two transmit antennas")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")
        if not (0.0 <= self.rho_corr <= 1.0):
            raise ValueError("rho_corr must lie in [0, 1]")
        if self.p_total <= 0:
            raise ValueError("p_total must be > 0")
        if self.grid_resolution < 8:
            raise ValueError("grid_resolution must be >= 8")

    def at_power(self, p_total: float) -> "ScbfConfig":
        return replace(self, p_total=p_total)


def scbf_channels(cfg: ScbfConfig) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic channel pair: |h2|^2 = alpha * |h1|^2 and
    <h1, h2> / (|h1| |h2|) = rho_corr."""
    h1 = np.zeros(cfg.m, dtype=complex)
    h1[0] = 1.0
    perp = np.zeros(cfg.m, dtype=complex)
    perp[1] = 1.0
    rho = cfg.rho_corr
    h2 = math.sqrt(cfg.alpha) * (rho * h1 + math.sqrt(1.0 - rho * rho) * perp)
    return h1, h2


def _check_beam(w: np.ndarray, name: str):
    if abs(np.linalg.norm(w) - 1.0) > 1e-9:
        raise ValueError(f"{name} must be unit norm")


def eval_scbf(cfg: ScbfConfig, w1: np.ndarray, w2: np.ndarray,
              p1: float, p2: float, use_sic: bool | None = None) -> tuple[float, float]:
    """(R1, R2) for explicit beams and powers.

    With use_sic unset, user 1 cancels the weak message exactly when doing so
    costs the weak message nothing (its own SINR for that message is at least
    user 2's); otherwise it treats the weak message as noise.
    """
    if p1 < 0 or p2 < 0 or p1 + p2 > cfg.p_total + 1e-9:
        raise ValueError("power budget violated")
    w1 = np.asarray(w1, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    _check_beam(w1, "w1")
    _check_beam(w2, "w2")
    h1, h2 = scbf_channels(cfg)
    g11 = abs(h1.conj() @ w1) ** 2
    g12 = abs(h1.conj() @ w2) ** 2
    g21 = abs(h2.conj() @ w1) ** 2
    g22 = abs(h2.conj() @ w2) ** 2
    s2_at_2 = p2 * g22 / (p1 * g21 + 1.0)
    s2_at_1 = p2 * g12 / (p1 * g11 + 1.0)
    if use_sic is None:
        use_sic = s2_at_1 >= s2_at_2
    if use_sic:
        r2 = math.log1p(min(s2_at_2, s2_at_1)) / LN2
        r1 = math.log1p(p1 * g11) / LN2
    else:
        r2 = math.log1p(s2_at_2) / LN2
        r1 = math.log1p(p1 * g11 / (p2 * g12 + 1.0)) / LN2
    return r1, r2


def _span_basis(h1: np.ndarray, h2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b1 = h1 / np.linalg.norm(h1)
    h2p = h2 - b1 * (b1.conj() @ h2)
    n = np.linalg.norm(h2p)
    if n > 1e-12 * np.linalg.norm(h2):
        return b1, h2p / n
    perp = np.zeros_like(b1)
    perp[1] = 1.0
    perp = perp - b1 * (b1.conj() @ perp)
    return b1, perp / np.linalg.norm(perp)


def beam_from_angle(cfg: ScbfConfig, theta: float) -> np.ndarray:
    """Unit beam cos(theta) b1 + sin(theta) b2 in the channel span."""
    h1, h2 = scbf_channels(cfg)
    b1, b2 = _span_basis(h1, h2)
    return math.cos(theta) * b1 + math.sin(theta) * b2
