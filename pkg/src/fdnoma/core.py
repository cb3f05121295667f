"""Numeric kernel: seeded random streams, complex Gaussian draws, the exponential
integral used by the analytic ergodic-capacity oracle, and the small dense
linear-algebra helpers behind the beamformers.

All operations are pure functions of their inputs; matrices never exceed a
handful of rows, so everything is dense and allocation-light.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.5772156649015328606

__all__ = [
    "RngStream",
    "NullSpaceExhaustedError",
    "NotPositiveDefiniteError",
    "complex_gaussian_vector",
    "complex_gaussian_matrix",
    "exp_integral_e1",
    "project_onto_complement",
    "hermitian_solve",
]


class NullSpaceExhaustedError(ValueError):
    """Raised when a projection is requested but the basis already spans the space."""


class NotPositiveDefiniteError(ValueError):
    """Raised when a matrix expected to be Hermitian positive definite is not."""


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream descriptor.

    The (seed, stream_id) pair selects an independent Philox key, so trials can
    be drawn in any order, or in parallel, and still produce identical results.
    Materialize with :meth:`generator`; a fresh generator always replays the
    same sequence.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & 0xFFFFFFFFFFFFFFFF)
        object.__setattr__(self, "stream_id", int(self.stream_id) & 0xFFFFFFFFFFFFFFFF)

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")


def complex_gaussian_vector(n: int, variance: float, rng) -> np.ndarray:
    """Draw n i.i.d. circularly-symmetric complex Gaussians with E|x|^2 = variance."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not math.isfinite(variance) or variance < 0:
        raise ValueError(f"variance must be finite and >= 0, got {variance}")
    gen = _as_generator(rng)
    scale = math.sqrt(variance / 2.0)
    re = gen.standard_normal(n)
    im = gen.standard_normal(n)
    return scale * (re + 1j * im)


def complex_gaussian_matrix(rows: int, cols: int, variance: float, rng) -> np.ndarray:
    """Matrix variant of :func:`complex_gaussian_vector`, row-major draw order."""
    if rows < 1 or cols < 1:
        raise ValueError(f"dims must be positive, got {rows}x{cols}")
    return complex_gaussian_vector(rows * cols, variance, rng).reshape(rows, cols)


def exp_integral_e1(x: float) -> float:
    """E1(x) = integral_x^inf exp(-t)/t dt for x > 0.

    Power series below 1, modified Lentz continued fraction above; both
    converge to better than 1e-14 relative over the range used here.
    """
    if not (x > 0):
        raise ValueError(f"exp_integral_e1 requires x > 0, got {x}")
    if x < 1.0:
        # E1(x) = -gamma - ln(x) + sum_{k>=1} (-1)^(k+1) x^k / (k * k!)
        total = -EULER_GAMMA - math.log(x)
        term = 1.0
        for k in range(1, 64):
            term *= -x / k
            contrib = -term / k
            total += contrib
            if abs(contrib) < 1e-18 * max(abs(total), 1e-300):
                break
        return total
    if x > 700.0:
        return 0.0  # below double underflow once e^-x is applied
    # continued fraction: E1(x) = e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...))))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    f = d
    for k in range(1, 200):
        a = -(k * k)
        b += 2.0
        d = b + a * d
        if abs(d) < tiny:
            d = tiny
        c = b + a / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x) * f


def _orthonormalize(basis, dtype=complex) -> list[np.ndarray]:
    """Gram-Schmidt with re-orthogonalization; rank-deficient inputs are deflated."""
    ortho: list[np.ndarray] = []
    for v in basis:
        u = np.asarray(v, dtype=dtype).copy()
        scale = np.linalg.norm(u)
        if scale == 0.0:
            continue
        for _ in range(2):  # second pass keeps residual overlap near machine eps
            for b in ortho:
                u -= b * (b.conj() @ u)
        norm = np.linalg.norm(u)
        if norm > 1e-12 * scale:
            ortho.append(u / norm)
    return ortho


def project_onto_complement(v: np.ndarray, basis) -> np.ndarray:
    """Component of v orthogonal to span(basis) under the Hermitian inner product.

    Raises NullSpaceExhaustedError when the (deflated) basis already spans the
    whole space, i.e. there is no complement left to project onto.
    """
    v = np.asarray(v, dtype=complex)
    n = v.shape[-1]
    ortho = _orthonormalize(basis)
    if len(ortho) >= n:
        raise NullSpaceExhaustedError(
            f"null space exhausted: {len(ortho)} independent directions in dim {n}"
        )
    p = v.copy()
    for _ in range(2):
        for b in ortho:
            p -= b * (b.conj() @ p)
    return p


def hermitian_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for Hermitian positive definite A via Cholesky."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"A must be square, got shape {a.shape}")
    if not np.allclose(a, a.conj().T, rtol=1e-10, atol=1e-12):
        raise NotPositiveDefiniteError("matrix is not Hermitian")
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("matrix is not positive definite") from exc
    y = np.linalg.solve(chol, b)
    return np.linalg.solve(chol.conj().T, y)
