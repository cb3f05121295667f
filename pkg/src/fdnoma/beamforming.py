"""Transmit and receive beamformer constructions.

Conventions: a receive beamformer w applied to an observation y produces
w^H y, so its gain on a channel h is |w^H h|^2. A transmit beamformer w sent
through a channel h arrives as h^T w, so its gain is |h^T w|^2. All returned
weights are unit norm.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import NullSpaceExhaustedError, hermitian_solve, project_onto_complement

__all__ = ["BeamformerKind", "Beamformer", "mrt", "mrc", "zf_receive", "mvdr", "nullspace_mrt"]


class BeamformerKind(enum.Enum):
    MRT = "mrt"
    MRC = "mrc"
    ZF_RX = "zf_rx"
    MVDR = "mvdr"
    NULLSPACE_MRT = "nullspace_mrt"


@dataclass(frozen=True)
class Beamformer:
    weights: np.ndarray
    kind: BeamformerKind

    def __post_init__(self):
        norm = np.linalg.norm(self.weights)
        if not np.isfinite(norm) or abs(norm - 1.0) > 1e-12:
            raise ValueError(f"beamformer weights must be unit norm, got {norm}")

    def receive_gain(self, h: np.ndarray) -> float:
        return float(np.abs(self.weights.conj() @ h) ** 2)

    def transmit_gain(self, h: np.ndarray) -> float:
        return float(np.abs(h @ self.weights) ** 2)


def _normalized(v: np.ndarray, kind: BeamformerKind) -> Beamformer:
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return Beamformer(weights=v / norm, kind=kind)


def mrt(h: np.ndarray) -> Beamformer:
    """Transmit beam matched to h: weights h*/|h|, gain |h^T w|^2 = |h|^2."""
    h = np.asarray(h, dtype=complex)
    return _normalized(h.conj(), BeamformerKind.MRT)


def mrc(h: np.ndarray) -> Beamformer:
    """Receive combiner matched to h: weights h/|h|, gain |w^H h|^2 = |h|^2."""
    h = np.asarray(h, dtype=complex)
    return _normalized(h.copy(), BeamformerKind.MRC)


def zf_receive(target: np.ndarray, nulls) -> Beamformer:
    """Receive beam maximizing the target gain under zero-forcing constraints.

    The weights are the target projected onto the orthogonal complement of the
    null directions; the gain on every declared null is below 1e-20 in power.
    """
    target = np.asarray(target, dtype=complex)
    p = project_onto_complement(target, nulls)
    if np.linalg.norm(p) < 1e-12 * np.linalg.norm(target):
        raise NullSpaceExhaustedError("target in null span")
    bf = _normalized(p, BeamformerKind.ZF_RX)
    return bf


def mvdr(target: np.ndarray, interference_cov: np.ndarray) -> Beamformer:
    """Receive beam maximizing SINR against a known interference-plus-noise covariance.

    Weights are proportional to R^-1 target; the covariance must include the
    noise floor so it stays positive definite.
    """
    target = np.asarray(target, dtype=complex)
    w = hermitian_solve(interference_cov, target)
    return _normalized(w, BeamformerKind.MVDR)


def nullspace_mrt(target: np.ndarray, nulls) -> Beamformer:
    """Transmit beam matched to the target inside the complement of the nulls.

    Transmit-side leakage |n^T w|^2 toward every null n is below 1e-20. With no
    nulls this reduces to plain MRT.
    """
    target = np.asarray(target, dtype=complex)
    null_conjs = [np.asarray(n, dtype=complex).conj() for n in nulls]
    p = project_onto_complement(target.conj(), null_conjs)
    if np.linalg.norm(p) < 1e-12 * np.linalg.norm(target):
        raise NullSpaceExhaustedError("target in null span")
    return _normalized(p, BeamformerKind.NULLSPACE_MRT)
