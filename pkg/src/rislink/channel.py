"""Rician fading channel between an N-element RIS and a K-antenna receiver.

The receiver combines its antennas with a statistical-CSI steering vector,
which collapses the link to an equivalent single-antenna channel vector
``g`` of length N. The combined line-of-sight part is K times a
unit-modulus vector; the combined scattered part is circular complex
Gaussian with per-element variance K. The equivalent receive SNR and
Rician factor after combining are

    rho' = (kappa*K + 1) / (1 + kappa) * rho,     kappa' = K * kappa.

Also houses the B-bit phase quantizer shared by every modulation scheme:
per-element phase shifts live on the uniform grid {k * 2pi / 2^B}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * np.pi


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class LinkConfig:
    """Physical and system parameters of one RIS downlink."""

    N: int
    K: int = 1
    kappa: float = 1.0
    B: int = 3
    ra_spacing_over_lambda: float = 0.5
    aoa_phi: float = 0.0
    rho: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError(f"N must be a positive integer: N={self.N}")
        if self.K < 1:
            raise ConfigError(f"K must be a positive integer: K={self.K}")
        if self.B < 1:
            raise ConfigError(f"B must be a positive integer: B={self.B}")
        if self.kappa < 0:
            raise ConfigError(f"kappa must be >= 0: kappa={self.kappa}")
        if self.rho <= 0:
            raise ConfigError(f"rho must be > 0: rho={self.rho}")
        if not -np.pi / 2 <= self.aoa_phi <= np.pi / 2:
            raise ConfigError(
                f"aoa_phi must lie in [-pi/2, pi/2]: aoa_phi={self.aoa_phi}"
            )


@dataclass(frozen=True)
class EquivalentLink:
    """Equivalent single-antenna SNR and Rician factor after combining."""

    rho_prime: float
    kappa_prime: float


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the combined channel vector g and its two components.

    ``los`` holds K times a unit-modulus vector (so ``los / K`` has
    unit-modulus entries); ``nlos`` is the phase-ramped sum of the K
    per-antenna scattered vectors, CN(0, K) per element.
    """

    g: np.ndarray
    los: np.ndarray
    nlos: np.ndarray
    kappa: float = field(default=0.0)


def equivalent_link(cfg: LinkConfig) -> EquivalentLink:
    """Reduce the K-antenna statistical-CSI receiver to a single antenna."""
    rho_prime = (cfg.kappa * cfg.K + 1.0) / (1.0 + cfg.kappa) * cfg.rho
    return EquivalentLink(rho_prime=rho_prime, kappa_prime=cfg.K * cfg.kappa)


def draw_channel(cfg: LinkConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one Rician realization of the combined channel vector.

    LoS phases are i.i.d. uniform per realization (gain statistics of the
    phase-compensating schemes are invariant to them). The scattered part
    is built literally as the combiner-weighted sum over the K antennas,
    each CN(0, I_N), weighted by the array phase ramp.
    """
    n = cfg.N
    los_unit = np.exp(1j * rng.uniform(0.0, TWO_PI, n))
    los = cfg.K * los_unit

    ramp = np.exp(
        1j * TWO_PI * cfg.ra_spacing_over_lambda * np.arange(cfg.K) * np.sin(cfg.aoa_phi)
    )
    nlos = np.zeros(n, dtype=complex)
    for k in range(cfg.K):
        re = rng.standard_normal(n)
        im = rng.standard_normal(n)
        nlos += ramp[k] * (re + 1j * im) / np.sqrt(2.0)

    a = np.sqrt(cfg.kappa / (1.0 + cfg.kappa))
    b = np.sqrt(1.0 / (1.0 + cfg.kappa))
    g = a * los + b * nlos
    return ChannelRealization(g=g, los=los, nlos=nlos, kappa=cfg.kappa)


def phase_grid(B: int) -> np.ndarray:
    """The 2^B quantized phase values {0, 2pi/2^B, ..., (2^B-1)*2pi/2^B}."""
    n_levels = 1 << B
    return TWO_PI * np.arange(n_levels) / n_levels


def wrap_angle(x: np.ndarray) -> np.ndarray:
    """Wrap angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x), TWO_PI)


def quantize_phase_index(z: np.ndarray, B: int) -> np.ndarray:
    """Index of the grid phase nearest to arg(z), ties to the smaller index.

    Accepts scalars or arrays; the wrapped residual never exceeds pi/2^B.
    An exact midpoint rounds down, except between the last grid point and
    zero, where index 0 is the smaller of the tied pair.
    """
    z = np.asarray(z)
    if np.any(z == 0):
        raise ValueError("undefined phase: zero input to the quantizer")
    n_levels = 1 << B
    x = np.angle(z) / (TWO_PI / n_levels)  # in (-n/2, n/2]
    k = np.ceil(x - 0.5)
    idx = k.astype(np.int64) % n_levels
    tie = (x - k) == 0.5
    if np.any(tie):
        idx = np.where(tie, np.minimum(idx, (idx + 1) % n_levels), idx)
    return idx


def quantize_phase(z: complex, B: int) -> float:
    """Grid phase nearest to arg(z) on the circle (B-bit resolution)."""
    idx = quantize_phase_index(z, B)
    return float(TWO_PI * idx / (1 << B))
