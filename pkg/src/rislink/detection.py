"""Maximum-likelihood detection by exhaustive minimum-distance search.

M never exceeds a few hundred here, so the O(M) scan is both the
production detector and the oracle for any future fast path. Ties break
toward the smallest label index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modulation import ConstellationSet


@dataclass(frozen=True)
class ReceivedSample:
    """One complex observation y at equivalent SNR rho'."""

    y: complex
    rho_prime: float

    def __post_init__(self):
        if self.rho_prime <= 0:
            raise ValueError(f"rho_prime must be > 0: {self.rho_prime}")


@dataclass(frozen=True)
class Detection:
    label: tuple[int, ...]
    index: int
    metric: float


def ml_detect(sample: ReceivedSample, constellation: ConstellationSet) -> Detection:
    """argmin over labels of |y - sqrt(rho') z|^2, ties to smallest index."""
    if constellation.M == 0:
        raise ValueError("empty constellation")
    d2 = np.abs(sample.y - np.sqrt(sample.rho_prime) * constellation.points) ** 2
    idx = int(np.argmin(d2))
    return Detection(
        label=constellation.labels[idx], index=idx, metric=float(d2[idx])
    )


def ml_detect_batch(
    y: np.ndarray, constellation: ConstellationSet, rho_prime: float
) -> np.ndarray:
    """Detected constellation indices for a batch of observations.

    Uses the expanded metric rho'|z|^2 - 2 sqrt(rho') Re(y conj(z)), whose
    argmin matches |y - sqrt(rho') z|^2; the cross term runs through BLAS.
    """
    z = constellation.points
    yr = np.column_stack([y.real, y.imag])
    zr = np.vstack([z.real, z.imag])
    cross = yr @ zr  # Re(y conj(z)) for every (sample, point) pair
    metric = rho_prime * np.abs(z) ** 2 - 2.0 * np.sqrt(rho_prime) * cross
    return np.argmin(metric, axis=1)
