"""Scenario link topologies and per-trial Rayleigh fading draws.

Every link is flat block-fading: one independent circularly-symmetric complex
Gaussian realization per trial, scaled so the per-entry average power equals
the link's avg_gain. Residual self-interference links are ordinary links whose
avg_gain is the post-cancellation residual power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import RngStream, complex_gaussian_matrix

__all__ = ["LinkSpec", "ChannelSet", "draw_channel", "draw_scenario_channels"]


@dataclass(frozen=True)
class LinkSpec:
    """One fading link: label, dimensions, and dimensionless average power."""

    label: str
    rows: int = 1
    cols: int = 1
    avg_gain: float = 1.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"link {self.label!r}: dims must be positive")
        if not np.isfinite(self.avg_gain) or self.avg_gain < 0:
            raise ValueError(f"link {self.label!r}: avg_gain must be finite and >= 0")


@dataclass
class ChannelSet:
    """One realization of every link in a topology, keyed by link label."""

    channels: dict[str, np.ndarray]
    trial_id: int = 0

    def __getitem__(self, label: str) -> np.ndarray:
        return self.channels[label]

    def __contains__(self, label: str) -> bool:
        return label in self.channels

    def labels(self):
        return self.channels.keys()


def draw_channel(spec: LinkSpec, rng) -> np.ndarray:
    """One rows x cols realization with per-entry expected power spec.avg_gain."""
    return complex_gaussian_matrix(spec.rows, spec.cols, spec.avg_gain, rng)


def draw_scenario_channels(topology: list[LinkSpec], rng: RngStream) -> ChannelSet:
    """Draw all links of a topology from one per-trial stream.

    Links are drawn in topology order from a single generator, so the set is a
    pure function of (topology, seed, trial_id) and links are mutually
    independent.
    """
    labels = [spec.label for spec in topology]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate link labels in topology: {labels}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    trial = rng.stream_id if isinstance(rng, RngStream) else 0
    channels = {spec.label: draw_channel(spec, gen) for spec in topology}
    return ChannelSet(channels=channels, trial_id=trial)


def draw_channel_batch(spec: LinkSpec, seed: int, trials: int,
                       first_trial: int = 0) -> np.ndarray:
    """Stacked realizations of one link for trials [first_trial, first_trial+trials).

    Bit-identical to per-trial :func:`draw_scenario_channels` draws only when
    produced through :func:`draw_topology_batch`, which preserves the in-trial
    draw order.
    """
    out = np.empty((trials, spec.rows, spec.cols), dtype=complex)
    for i in range(trials):
        out[i] = draw_channel(spec, RngStream(seed, first_trial + i))
    return out


def draw_topology_batch(topology: list[LinkSpec], seed: int, trials: int,
                        first_trial: int = 0) -> dict[str, np.ndarray]:
    """All links for a range of trials, stacked along a leading trial axis.

    Matches the per-trial path exactly: each trial uses its own (seed, trial)
    stream and draws links in topology order. The draw arithmetic is inlined
    (but bit-identical to :func:`draw_channel`) to keep large batches cheap.
    """
    labels = [spec.label for spec in topology]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate link labels in topology: {labels}")
    out = {spec.label: np.empty((trials, spec.rows, spec.cols), dtype=complex)
           for spec in topology}
    # one normal draw per trial; chunked standard_normal calls are
    # stream-equivalent, so slicing reproduces the per-link draw order
    sizes = [spec.rows * spec.cols for spec in topology]
    total = 2 * sum(sizes)
    re_idx = np.concatenate([np.arange(o, o + n) for o, n in
                             zip(np.cumsum([0] + [2 * n for n in sizes[:-1]]), sizes)])
    im_idx = re_idx + np.repeat(sizes, sizes)
    scales = np.repeat([math.sqrt(s.avg_gain / 2.0) for s in topology], sizes)
    offsets = np.cumsum([0] + sizes)
    flat = np.empty(sum(sizes), dtype=complex)
    seed64 = int(seed) & 0xFFFFFFFFFFFFFFFF
    key = np.empty(2, dtype=np.uint64)
    key[0] = seed64
    for i in range(trials):
        key[1] = (first_trial + i) & 0xFFFFFFFFFFFFFFFF
        gen = np.random.Generator(np.random.Philox(key=key))
        draws = gen.standard_normal(total)
        np.multiply(scales, draws[re_idx] + 1j * draws[im_idx], out=flat)
        for spec, a, b in zip(topology, offsets, offsets[1:]):
            out[spec.label][i] = flat[a:b].reshape(spec.rows, spec.cols)
    return out
