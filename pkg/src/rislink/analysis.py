"""Closed-form and quadrature-based performance theory.

Contents:

* moments of the phase-compensated per-block channel gain under B-bit
  quantization and Rician fading, and their two-moment Gamma fit;
* DCMC capacity of a fixed constellation via a double Gauss-Hermite sum,
  plus the upper bound obtained by evaluating the same sum on the
  constellation built from expected block gains;
* symbol error probabilities: the A-PSK wedge decomposition evaluated
  with Craig-form integrals, and the QA-PSK nearest-boundary Q-function
  approximation.

Gains enter the error formulas through their real parts: the compensated
block gain is concentrated on the positive real axis (its argument never
exceeds the quantizer half-step), and the derivations track only the
in-phase component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy import special

from .errors import ConfigError, NumericalError
from .modulation import APSK, PSK, QAPSK, SchemeConfig, statistical_signal_set

__all__ = [
    "laguerre_half",
    "GainMoments",
    "gain_moments",
    "GammaFit",
    "gamma_fit",
    "QuadratureRule",
    "dcmc_capacity_gh",
    "dcmc_capacity_ub",
    "Wedge",
    "craig_wedge",
    "apsk_layer_wedges",
    "sep_apsk_theory",
    "sep_qapsk_theory",
    "q_function",
    "scheme_block_size",
]


def laguerre_half(x: float) -> float:
    """Laguerre function of order 1/2 at -x, for x >= 0.

    L_{1/2}(-x) = e^{-x/2} [(1+x) I0(x/2) + x I1(x/2)], evaluated with
    exponentially scaled Bessel functions so large x cannot overflow.
    """
    if x < 0:
        raise ValueError(f"laguerre_half expects x >= 0, got {x}")
    return float((1.0 + x) * special.i0e(x / 2.0) + x * special.i1e(x / 2.0))


def _angular_mean_cos(B: int) -> float:
    """E[cos psi] for psi uniform on (-pi/2^B, pi/2^B)."""
    n = 1 << B
    return n / math.pi * math.sin(math.pi / n)


def _angular_mean_cos2(B: int) -> float:
    """E[cos^2 psi] for psi uniform on (-pi/2^B, pi/2^B)."""
    n = 1 << B
    return 0.5 * (1.0 + n / (2.0 * math.pi) * math.sin(2.0 * math.pi / n))


def rician_amplitude_mean(kappa_prime: float) -> float:
    """Mean of the unit-power Rician amplitude with factor kappa'.

    sigma sqrt(pi/2) L_{1/2}(-kappa') with sigma^2 = 1/(2(1+kappa')); the
    second moment of this amplitude is exactly 1.
    """
    sigma = math.sqrt(1.0 / (2.0 * (1.0 + kappa_prime)))
    return sigma * math.sqrt(math.pi / 2.0) * laguerre_half(kappa_prime)


@dataclass(frozen=True)
class GainMoments:
    """First two moments of the in-phase compensated block gain."""

    mean: float
    second: float
    n_block: int
    B: int
    kappa_prime: float

    @property
    def variance(self) -> float:
        return self.second - self.mean**2


def gain_moments(n_block: int, B: int, kappa_prime: float) -> GainMoments:
    """Moments of X = sum over a block of alpha_i cos(psi_i).

    alpha_i is the unit-power Rician amplitude (factor kappa'), psi_i the
    quantizer residual, uniform on (-pi/2^B, pi/2^B), independent across
    elements and of the amplitudes:

        E[X]   = n 2^B/pi sin(pi/2^B) sigma sqrt(pi/2) L_{1/2}(-kappa')
        E[X^2] = n(n-1) (E[X]/n)^2 + n (1 + 2^B/(2 pi) sin(2 pi/2^B)) / 2
    """
    if n_block < 1:
        raise ConfigError(f"n_block must be >= 1: {n_block}")
    e_cos = _angular_mean_cos(B)
    e_alpha = rician_amplitude_mean(kappa_prime)
    per_element = e_alpha * e_cos
    mean = n_block * per_element
    second = n_block * (n_block - 1) * per_element**2 + n_block * _angular_mean_cos2(B)
    return GainMoments(
        mean=mean, second=second, n_block=n_block, B=B, kappa_prime=kappa_prime
    )


@dataclass(frozen=True)
class GammaFit:
    """Gamma(shape k, scale theta) matched to a mean and second moment."""

    k: float
    theta: float


def gamma_fit(m: GainMoments) -> GammaFit:
    """Two-moment Gamma fit: k theta = mean, k theta^2 = variance."""
    var = m.second - m.mean**2
    if var <= 0:
        raise ValueError(
            f"non-positive variance in Gamma fit: mean={m.mean}, second={m.second}"
        )
    return GammaFit(k=m.mean**2 / var, theta=var / m.mean)


def scheme_block_size(scheme: SchemeConfig, N: int) -> int:
    """Elements per block: N*V/M for APSK, (N/2)*sqrt(V/M) for QAPSK, N for PSK."""
    if scheme.kind == PSK:
        return N
    if scheme.kind == APSK:
        return N * scheme.V // scheme.M
    return (N // 2) // scheme.branch_layers


# ---------------------------------------------------------------------------
# DCMC capacity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes/weights for the weight exp(-t^2)."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def gauss_hermite(cls, order: int = 16) -> "QuadratureRule":
        if order < 1:
            raise ConfigError(f"quadrature order must be >= 1: {order}")
        nodes, weights = hermgauss(order)
        return cls(order=order, nodes=nodes, weights=weights)


def dcmc_capacity_gh(
    points: np.ndarray, rho_prime: float, rule: QuadratureRule | None = None
) -> float:
    """DCMC capacity in bits of a fixed constellation at equivalent SNR rho'.

    Equiprobable points, observation y = sqrt(rho') z + n with n ~ CN(0,1);
    the Gaussian expectation is replaced by the tensor Gauss-Hermite sum:

        R = log2 M - 1/(M pi) sum_{p1,p2} w_p1 w_p2 sum_m1 log2
            sum_m2 exp(-2 t . d - |d|^2),   d = sqrt(rho')(z_m1 - z_m2).
    """
    points = np.asarray(getattr(points, "points", points), dtype=complex)
    M = len(points)
    if M < 2:
        raise ConfigError(f"constellation must have at least 2 points: M={M}")
    if rule is None:
        rule = QuadratureRule.gauss_hermite()
    sq = math.sqrt(rho_prime)
    diff = points[:, None] - points[None, :]
    d1 = sq * diff.real
    d2 = sq * diff.imag
    d_sq = d1**2 + d2**2

    t = rule.nodes
    w = rule.weights
    total = 0.0
    # Vectorize the inner node loop; the exponent is bounded by t^2, so a
    # plain exp cannot overflow.
    for p1 in range(rule.order):
        args = (
            -2.0 * t[p1] * d1[None, :, :]
            - 2.0 * t[:, None, None] * d2[None, :, :]
            - d_sq[None, :, :]
        )
        inner = np.sum(np.exp(args), axis=2)  # (order, M)
        f = np.sum(np.log2(inner), axis=1)  # (order,)
        total += w[p1] * np.dot(w, f)

    r = float(math.log2(M) - total / (M * math.pi))
    if not (-1e-9 <= r <= math.log2(M) + 1e-9):
        raise NumericalError(
            f"capacity {r} outside [0, log2 M = {math.log2(M)}]"
        )
    return r


def dcmc_capacity_ub(
    scheme: SchemeConfig,
    mean_block_gain: float,
    rho_prime: float,
    rule: QuadratureRule | None = None,
) -> float:
    """Capacity upper bound: the Gauss-Hermite sum on the mean constellation.

    The mean constellation replaces every block gain by its expectation
    E[X], which makes it deterministic, so no channel averaging is needed.
    """
    if scheme.kind == PSK:
        raise ConfigError("capacity upper bound is defined for APSK/QAPSK only")
    stat = statistical_signal_set(scheme, mean_block_gain)
    return dcmc_capacity_gh(stat.points, rho_prime, rule)


# ---------------------------------------------------------------------------
# Symbol error probability
# ---------------------------------------------------------------------------


def q_function(x: float) -> float:
    """Gaussian tail Q(x) = 0.5 erfc(x / sqrt(2))."""
    return 0.5 * special.erfc(x / math.sqrt(2.0))


def _adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int) -> float:
    """Adaptive Simpson quadrature with absolute tolerance accounting."""
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, fa, m, fm, b, fb, s, tol, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = left + right - s
        if abs(err) <= 15.0 * tol:
            return left + right + err / 15.0
        if depth <= 0:
            raise NumericalError(
                f"adaptive Simpson depth exhausted; achieved estimate "
                f"{left + right + err / 15.0} with local error ~{abs(err) / 15.0}"
            )
        return rec(a, fa, lm, flm, m, fm, left, tol / 2.0, depth - 1) + rec(
            m, fm, rm, frm, b, fb, right, tol / 2.0, depth - 1
        )

    return rec(a, fa, m, fm, b, fb, whole, tol, max_depth)


@dataclass(frozen=True)
class Wedge:
    """One Craig-form wedge: distance scale b, opening theta_max, offset psi."""

    b: float
    theta_max: float
    psi: float

    def validate(self, where: str = "") -> None:
        ctx = f" in {where}" if where else ""
        if not self.b > 0:
            raise ConfigError(f"invalid wedge geometry{ctx}: b={self.b} (need > 0)")
        if not 0 < self.theta_max < 2.0 * math.pi:
            raise ConfigError(
                f"invalid wedge geometry{ctx}: theta_max={self.theta_max} "
                f"(need in (0, 2pi))"
            )
        if not 0 < self.psi < math.pi:
            raise ConfigError(
                f"invalid wedge geometry{ctx}: psi={self.psi} (need in (0, pi))"
            )


def craig_wedge(
    b: float,
    theta_max: float,
    psi: float,
    rho_prime: float,
    tol: float = 1e-12,
    max_depth: int = 40,
) -> float:
    """(1/2pi) integral_0^theta_max exp(-rho' b^2 sin^2 psi / sin^2(theta+psi)) dtheta."""
    Wedge(b=b, theta_max=theta_max, psi=psi).validate()
    if rho_prime < 0:
        raise ConfigError(f"rho_prime must be >= 0: {rho_prime}")
    c = rho_prime * b * b * math.sin(psi) ** 2

    def integrand(theta):
        s2 = math.sin(theta + psi) ** 2
        if s2 == 0.0:
            return 0.0 if c > 0 else 1.0
        return math.exp(-c / s2)

    val = _adaptive_simpson(integrand, 0.0, theta_max, tol, max_depth)
    return val / (2.0 * math.pi)


def _outer_halfplane_integral(
    b: float, psi: float, rho_prime: float, tol: float = 1e-12, max_depth: int = 40
) -> float:
    """(1/pi) integral_0^{pi-psi} exp(-rho' b^2 sin^2 psi / sin^2 theta) dtheta.

    The open wedge beyond the outermost layer; the integrand's removable
    zero at theta = 0 is handled explicitly.
    """
    if not 0 < psi < math.pi:
        raise ConfigError(f"invalid outer wedge: psi={psi} (need in (0, pi))")
    c = rho_prime * b * b * math.sin(psi) ** 2

    def integrand(theta):
        s2 = math.sin(theta) ** 2
        if s2 == 0.0:
            return 0.0 if c > 0 else 1.0
        return math.exp(-c / s2)

    val = _adaptive_simpson(integrand, 0.0, math.pi - psi, tol, max_depth)
    return val / math.pi


def apsk_layer_wedges(x: np.ndarray, l: int, V: int) -> list[Wedge]:
    """Craig wedges of the ML decision region for layer l of an A-PSK ring set.

    x holds the per-layer gains X_1..X_{M/V} (real, positive). The first
    layer's region is a triangle (three wedges), middle layers are bounded
    by the two neighbouring rings (four wedges), and the outermost layer
    is open (one wedge plus the half-plane term handled by the caller).
    """
    x = np.asarray(x, dtype=float)
    layers = len(x)
    if not 1 <= l <= layers:
        raise ConfigError(f"layer out of range: l={l}, layers={layers}")
    tv = math.tan(math.pi / V)
    s = np.concatenate(([0.0], np.cumsum(x)))  # s[i] = X_1 + ... + X_i

    if l == layers:
        # Outermost layer: caller combines this wedge with the open term.
        a_in = math.atan((1.0 + 2.0 * s[l - 1] / x[l - 1]) * tv)
        b0 = math.sqrt((s[l - 1] + 0.5 * x[l - 1]) ** 2 * tv**2 + (0.5 * x[l - 1]) ** 2)
        return [Wedge(b=b0, theta_max=2.0 * a_in, psi=math.pi / 2.0 - a_in)]

    if l == 1:
        a_out = math.atan((1.0 + 2.0 * x[0] / x[1]) * tv)
        b_out = math.sqrt((x[0] + 0.5 * x[1]) ** 2 * tv**2 + (0.5 * x[1]) ** 2)
        return [
            Wedge(b=b_out, theta_max=math.pi - a_out, psi=a_out - math.pi / V),
            Wedge(b=x[0], theta_max=2.0 * a_out, psi=math.pi / V),
            Wedge(b=b_out, theta_max=math.pi - a_out, psi=math.pi / 2.0 - a_out),
        ]

    a_in = math.atan((1.0 + 2.0 * s[l - 1] / x[l - 1]) * tv)
    a_out = math.atan((1.0 + 2.0 * s[l] / x[l]) * tv)
    b_in = math.sqrt((s[l - 1] + 0.5 * x[l - 1]) ** 2 * tv**2 + (0.5 * x[l - 1]) ** 2)
    b_out = math.sqrt((s[l] + 0.5 * x[l]) ** 2 * tv**2 + (0.5 * x[l]) ** 2)
    return [
        Wedge(b=b_out, theta_max=math.pi - a_in, psi=a_out - math.pi / V),
        Wedge(b=b_in, theta_max=2.0 * a_in, psi=math.pi / 2.0 - a_in),
        Wedge(b=b_in, theta_max=math.pi - a_in, psi=a_in + math.pi / V),
        Wedge(b=b_out, theta_max=2.0 * a_out, psi=math.pi / 2.0 - a_out),
    ]


def apsk_layer_error(x: np.ndarray, l: int, V: int, rho_prime: float) -> float:
    """Error probability of layer l (wedge sum, outer layer gets the open term)."""
    x = np.asarray(x, dtype=float)
    layers = len(x)
    wedges = apsk_layer_wedges(x, l, V)
    where = f"layer {l}"
    for wdg in wedges:
        wdg.validate(where)
    p = sum(craig_wedge(w.b, w.theta_max, w.psi, rho_prime) for w in wedges)
    if l == layers:
        a_in = math.atan(
            (1.0 + 2.0 * np.sum(x[: l - 1]) / x[l - 1]) * math.tan(math.pi / V)
        )
        psi1 = a_in + math.pi / V
        if not 0 < psi1 < math.pi:
            raise ConfigError(f"invalid wedge geometry in {where}: psi={psi1}")
        # The open term appears twice (one per bounding ray).
        p += 2.0 * _outer_halfplane_integral(wedges[0].b, psi1, rho_prime)
    return p


def sep_apsk_theory(
    block_gains: np.ndarray, rho_prime: float, M: int, V: int
) -> float:
    """A-PSK symbol error probability for one set of layer gains.

    Averages the per-layer wedge sums uniformly over the M/V layers. The
    wedge decomposition is a boundary approximation: below the waterfall
    region it can exceed 1.
    """
    x = np.asarray(block_gains, dtype=float)
    if len(x) != M // V:
        raise ConfigError(
            f"need one gain per layer: got {len(x)}, M/V={M // V}"
        )
    if np.any(x <= 0):
        raise ConfigError("block gains must be positive")
    layers = M // V
    return float(
        np.mean([apsk_layer_error(x, l, V, rho_prime) for l in range(1, layers + 1)])
    )


def sep_qapsk_theory(
    gains_i: np.ndarray,
    gains_q: np.ndarray,
    rho_prime: float,
    M: int,
    V: int,
) -> float:
    """QA-PSK symbol error probability from the nearest decision boundaries.

    gains_i / gains_q hold the per-branch block gains X_1..X_sqrt(M/V)
    (real); only levels l >= 2 enter. The cross term is weighted q = 4
    for V = 4 and q = 2 for V >= 8. Both terms are pairwise errors
    Q(sqrt(rho' d^2 / 2)) for boundary distance d in signal space (d = X_l
    along a branch; the diagonal distance follows the law of cosines with
    the 2pi/V angle between the branch axes).
    """
    if V < 4:
        raise ConfigError(f"QA-PSK error formula requires V >= 4: V={V}")
    xi = np.asarray(gains_i, dtype=float)
    xq = np.asarray(gains_q, dtype=float)
    root = int(round(math.sqrt(M / V)))
    if len(xi) != root or len(xq) != root:
        raise ConfigError(
            f"need sqrt(M/V)={root} gains per branch: got {len(xi)}, {len(xq)}"
        )
    if np.any(xi <= 0) or np.any(xq <= 0):
        raise ConfigError("block gains must be positive")
    q = 4.0 if V == 4 else 2.0
    sq = math.sqrt(rho_prime / 2.0)
    cosv = math.cos(2.0 * math.pi / V)
    branch = sum(
        q_function(sq * xi[l]) + q_function(sq * xq[l]) for l in range(1, root)
    )
    cross = sum(
        q_function(
            math.sqrt(
                rho_prime
                * (xi[l] ** 2 + xq[l] ** 2 - 2.0 * cosv * xi[l] * xq[l])
                / 2.0
            )
        )
        for l in range(1, root)
    )
    return 2.0 / root * branch + q / (M / V) * cross
