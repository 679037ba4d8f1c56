"""RIS symbol mapping: ON-OFF block patterns, phase patterns, constellations.

Three schemes share one machinery:

* ``PSK``: every element ON; symbol m rotates the phase-compensated
  pattern by 2pi*m/M before B-bit quantization.
* ``APSK``: the surface is split into M/V contiguous blocks; the first l
  blocks are ON (amplitude level), and all ON elements carry one of V
  phase rotations. Received points are rotated prefix sums of the
  per-block compensated gains X_l.
* ``QAPSK``: first half of the surface is the in-phase branch, second
  half the quadrature branch; each branch has sqrt(M/V) blocks, the
  quadrature branch carrying one extra grid rotation of 2pi/V so the two
  branch amplitudes span a two-dimensional grid.

Quantization is applied after the symbol rotation (the ground-truth
order); because V divides 2^B the rotation lands on the phase grid and
commutes with the quantizer, which the tests assert.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import TWO_PI, ChannelRealization, phase_grid, quantize_phase_index
from .errors import ConfigError

PSK = "PSK"
APSK = "APSK"
QAPSK = "QAPSK"
SCHEME_KINDS = (PSK, APSK, QAPSK)


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SchemeConfig:
    """Modulation scheme: kind plus constellation order M and phase levels V."""

    kind: str
    M: int
    V: int | None = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ConfigError(f"unknown scheme kind: {self.kind!r}")
        if not _is_pow2(self.M):
            raise ConfigError(f"M must be a power of 2: M={self.M}")
        if self.kind == PSK:
            if self.V is not None:
                raise ConfigError("PSK takes no V")
            return
        if self.V is None:
            raise ConfigError(f"{self.kind} requires V")
        if not _is_pow2(self.V):
            raise ConfigError(f"V must be a power of 2: V={self.V}")
        if self.V > self.M:
            raise ConfigError(f"V must not exceed M: V={self.V}, M={self.M}")
        if self.kind == QAPSK:
            layers = self.M // self.V
            root = int(round(np.sqrt(layers)))
            if root * root != layers:
                raise ConfigError(
                    f"QAPSK requires M/V to be a perfect square: M/V={layers}"
                )

    @property
    def layers(self) -> int:
        """Number of amplitude levels M/V (meaningful for APSK/QAPSK)."""
        return self.M // (self.V or self.M)

    @property
    def branch_layers(self) -> int:
        """Per-branch amplitude levels sqrt(M/V) for QAPSK."""
        return int(round(np.sqrt(self.M // self.V)))


def validate_scheme(scheme: SchemeConfig, N: int, B: int) -> None:
    """Check the scheme against surface size N and phase resolution B."""
    if scheme.kind == PSK:
        return
    if (1 << B) % scheme.V != 0:
        raise ConfigError(f"V must divide 2^B: V={scheme.V}, B={B}")
    if scheme.kind == APSK:
        if N % scheme.layers != 0:
            raise ConfigError(
                f"M/V must divide N (block size N*V/M must be an integer): "
                f"M/V={scheme.layers}, N={N}"
            )
    else:
        if B < 2:
            raise ConfigError(f"QAPSK requires B >= 2: B={B}")
        if N % 2 != 0:
            raise ConfigError(f"QAPSK requires even N: N={N}")
        half = N // 2
        if half % scheme.branch_layers != 0:
            raise ConfigError(
                f"sqrt(M/V) must divide N/2 (block size (N/2)*sqrt(V/M) must "
                f"be an integer): sqrt(M/V)={scheme.branch_layers}, N={N}"
            )


BRANCH_NONE = "none"
BRANCH_I = "I"
BRANCH_Q = "Q"


@dataclass(frozen=True)
class BlockPartition:
    """Contiguous element ranges [start, stop) with a branch tag per block."""

    blocks: tuple[tuple[int, int], ...]
    branch: tuple[str, ...]

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def indices(self, b: int) -> np.ndarray:
        start, stop = self.blocks[b]
        return np.arange(start, stop)


def partition_blocks(N: int, scheme: SchemeConfig) -> BlockPartition:
    """Canonical contiguous block partition of the N elements.

    APSK: M/V blocks of N*V/M elements each. QAPSK: the first N/2 elements
    form the I-branch, the rest the Q-branch, each branch holding
    sqrt(M/V) blocks. PSK: one block of N.
    """
    if scheme.kind == PSK:
        return BlockPartition(blocks=((0, N),), branch=(BRANCH_NONE,))
    if scheme.kind == APSK:
        if N % scheme.layers != 0:
            raise ConfigError(
                f"M/V must divide N (block size N*V/M must be an integer): "
                f"M/V={scheme.layers}, N={N}"
            )
        size = N // scheme.layers
        blocks = tuple((i * size, (i + 1) * size) for i in range(scheme.layers))
        return BlockPartition(blocks=blocks, branch=(BRANCH_NONE,) * scheme.layers)
    # QAPSK
    if N % 2 != 0:
        raise ConfigError(f"QAPSK requires even N: N={N}")
    half = N // 2
    per_branch = scheme.branch_layers
    if half % per_branch != 0:
        raise ConfigError(
            f"sqrt(M/V) must divide N/2 (block size (N/2)*sqrt(V/M) must be "
            f"an integer): sqrt(M/V)={per_branch}, N={N}"
        )
    size = half // per_branch
    i_blocks = tuple((i * size, (i + 1) * size) for i in range(per_branch))
    q_blocks = tuple((half + i * size, half + (i + 1) * size) for i in range(per_branch))
    return BlockPartition(
        blocks=i_blocks + q_blocks,
        branch=(BRANCH_I,) * per_branch + (BRANCH_Q,) * per_branch,
    )


@dataclass(frozen=True)
class RisPattern:
    """Per-element ON-OFF amplitudes and quantized phase indices."""

    amplitude: np.ndarray  # uint8 in {0, 1}
    phase_index: np.ndarray  # int, into phase_grid(B); meaningful where ON
    B: int

    @property
    def phase(self) -> np.ndarray:
        """Quantized phase values k*2pi/2^B."""
        return TWO_PI * self.phase_index / (1 << self.B)

    def received_point(self, g: np.ndarray) -> complex:
        """Combined received signal: sum over ON elements of g_n e^{j theta_n}."""
        on = self.amplitude.astype(bool)
        return complex(np.sum(g[on] * np.exp(1j * self.phase[on])))


def psk_pattern(ch: ChannelRealization, m: int, M: int, B: int) -> RisPattern:
    """All elements ON; phases quantize the m-th rotation of conj(g)."""
    if not 0 <= m < M:
        raise ConfigError(f"PSK symbol out of range: m={m}, M={M}")
    target = np.exp(1j * TWO_PI * m / M) * np.conj(ch.g)
    idx = quantize_phase_index(target, B)
    return RisPattern(
        amplitude=np.ones(len(ch.g), dtype=np.uint8), phase_index=idx, B=B
    )


def apsk_pattern(
    ch: ChannelRealization,
    part: BlockPartition,
    l: int,
    v: int,
    scheme: SchemeConfig,
    B: int,
) -> RisPattern:
    """Blocks 1..l ON with the v-rotated compensating phases, the rest OFF."""
    if not 1 <= l <= scheme.layers:
        raise ConfigError(f"APSK layer out of range: l={l}, M/V={scheme.layers}")
    if not 0 <= v < scheme.V:
        raise ConfigError(f"phase index out of range: v={v}, V={scheme.V}")
    n = len(ch.g)
    amplitude = np.zeros(n, dtype=np.uint8)
    phase_index = np.zeros(n, dtype=np.int64)
    stop = part.blocks[l - 1][1]
    amplitude[:stop] = 1
    target = np.exp(1j * TWO_PI * v / scheme.V) * np.conj(ch.g[:stop])
    phase_index[:stop] = quantize_phase_index(target, B)
    return RisPattern(amplitude=amplitude, phase_index=phase_index, B=B)


def qapsk_pattern(
    ch: ChannelRealization,
    part: BlockPartition,
    l1: int,
    l2: int,
    v: int,
    scheme: SchemeConfig,
    B: int,
) -> RisPattern:
    """I-blocks 1..l1 and Q-blocks 1..l2 ON; Q carries the extra 2pi/V step."""
    root = scheme.branch_layers
    if not (1 <= l1 <= root and 1 <= l2 <= root):
        raise ConfigError(
            f"QAPSK layers out of range: l1={l1}, l2={l2}, sqrt(M/V)={root}"
        )
    if not 0 <= v < scheme.V:
        raise ConfigError(f"phase index out of range: v={v}, V={scheme.V}")
    n = len(ch.g)
    half = n // 2
    n_levels = 1 << B
    q_step = n_levels // scheme.V  # grid steps in one 2pi/V rotation

    amplitude = np.zeros(n, dtype=np.uint8)
    phase_index = np.zeros(n, dtype=np.int64)
    rot = np.exp(1j * TWO_PI * v / scheme.V)

    stop_i = part.blocks[l1 - 1][1]
    amplitude[:stop_i] = 1
    phase_index[:stop_i] = quantize_phase_index(rot * np.conj(ch.g[:stop_i]), B)

    stop_q = part.blocks[root + l2 - 1][1]
    amplitude[half:stop_q] = 1
    idx_q = quantize_phase_index(rot * np.conj(ch.g[half:stop_q]), B)
    phase_index[half:stop_q] = (idx_q + q_step) % n_levels
    return RisPattern(amplitude=amplitude, phase_index=phase_index, B=B)


@dataclass(frozen=True)
class ConstellationSet:
    """Ordered received-signal points with their generating labels.

    Labels are v-major: consecutive runs of the amplitude levels at fixed
    v. ``labels[i]`` is ``(m,)`` for PSK, ``(l, v)`` for APSK, and
    ``(l1, l2, v)`` for QAPSK. ``block_gains`` holds the compensated
    per-block channel gains at v = 0: X_l for APSK, and the pair
    (X_I, X_Q) stacked as rows for QAPSK (the Q row de-rotated by 2pi/V).
    """

    points: np.ndarray
    labels: tuple[tuple[int, ...], ...]
    scheme: SchemeConfig
    block_gains: np.ndarray | None = None

    @property
    def M(self) -> int:
        return len(self.points)


def label_to_index(scheme: SchemeConfig, label: tuple[int, ...]) -> int:
    """Map a symbol label tuple to its constellation index (v-major)."""
    if scheme.kind == PSK:
        (m,) = label
        return m
    if scheme.kind == APSK:
        l, v = label
        return v * scheme.layers + (l - 1)
    l1, l2, v = label
    root = scheme.branch_layers
    return v * scheme.layers + (l1 - 1) * root + (l2 - 1)


def index_to_label(scheme: SchemeConfig, index: int) -> tuple[int, ...]:
    """Inverse of :func:`label_to_index`."""
    if scheme.kind == PSK:
        return (index,)
    if scheme.kind == APSK:
        v, rem = divmod(index, scheme.layers)
        return (rem + 1, v)
    v, rem = divmod(index, scheme.layers)
    root = scheme.branch_layers
    l1, l2 = divmod(rem, root)
    return (l1 + 1, l2 + 1, v)


def all_labels(scheme: SchemeConfig) -> tuple[tuple[int, ...], ...]:
    return tuple(index_to_label(scheme, i) for i in range(scheme.M))


def _block_prefix_sums(contrib: np.ndarray, edges: list[int]) -> np.ndarray:
    """Cumulative sums of per-element contributions at block boundaries."""
    csum = np.concatenate(([0.0 + 0.0j], np.cumsum(contrib)))
    return np.array([csum[e] for e in edges])


def received_signal_set(
    ch: ChannelRealization, scheme: SchemeConfig, part: BlockPartition, B: int
) -> ConstellationSet:
    """All M received points g . Theta(label) for one channel realization.

    Each point is the literal sum over ON elements of g_n e^{j theta_n},
    with theta built by the scheme's pattern rule (quantize after the
    symbol rotation). Work is shared across labels with equal rotation.
    """
    g = ch.g
    labels = all_labels(scheme)
    points = np.empty(scheme.M, dtype=complex)

    if scheme.kind == PSK:
        for m in range(scheme.M):
            target = np.exp(1j * TWO_PI * m / scheme.M) * np.conj(g)
            idx = quantize_phase_index(target, B)
            points[m] = np.sum(g * np.exp(1j * TWO_PI * idx / (1 << B)))
        idx0 = quantize_phase_index(np.conj(g), B)
        x0 = np.sum(g * np.exp(1j * TWO_PI * idx0 / (1 << B)))
        return ConstellationSet(
            points=points,
            labels=labels,
            scheme=scheme,
            block_gains=np.array([x0]),
        )

    grid = phase_grid(B)
    if scheme.kind == APSK:
        edges = [stop for _, stop in part.blocks]
        for v in range(scheme.V):
            target = np.exp(1j * TWO_PI * v / scheme.V) * np.conj(g)
            idx = quantize_phase_index(target, B)
            contrib = g * np.exp(1j * grid[idx])
            layer_points = _block_prefix_sums(contrib, edges)
            base = v * scheme.layers
            points[base : base + scheme.layers] = layer_points
            if v == 0:
                block_gains = np.diff(np.concatenate(([0.0 + 0.0j], layer_points)))
        return ConstellationSet(
            points=points, labels=labels, scheme=scheme, block_gains=block_gains
        )

    # QAPSK
    root = scheme.branch_layers
    half = len(g) // 2
    n_levels = 1 << B
    q_step = n_levels // scheme.V
    edges_i = [stop for _, stop in part.blocks[:root]]
    edges_q = [stop - half for _, stop in part.blocks[root:]]
    for v in range(scheme.V):
        rot = np.exp(1j * TWO_PI * v / scheme.V)
        idx_i = quantize_phase_index(rot * np.conj(g[:half]), B)
        idx_q = (quantize_phase_index(rot * np.conj(g[half:]), B) + q_step) % n_levels
        contrib_i = g[:half] * np.exp(1j * grid[idx_i])
        contrib_q = g[half:] * np.exp(1j * grid[idx_q])
        sums_i = _block_prefix_sums(contrib_i, edges_i)
        sums_q = _block_prefix_sums(contrib_q, edges_q)
        base = v * scheme.layers
        for j1 in range(root):
            for j2 in range(root):
                points[base + j1 * root + j2] = sums_i[j1] + sums_q[j2]
        if v == 0:
            x_i = np.diff(np.concatenate(([0.0 + 0.0j], sums_i)))
            x_q = np.diff(np.concatenate(([0.0 + 0.0j], sums_q)))
            block_gains = np.vstack(
                [x_i, np.exp(-1j * TWO_PI / scheme.V) * x_q]
            )
    return ConstellationSet(
        points=points, labels=labels, scheme=scheme, block_gains=block_gains
    )


def statistical_signal_set(
    scheme: SchemeConfig, mean_block_gain: float
) -> ConstellationSet:
    """Constellation built from the expected block gain E[X].

    All blocks share E[X], so APSK collapses to M/V nested circles of V
    points, QAPSK to the two-dimensional amplitude grid, and PSK to one
    circle of M points (radius = full-surface E[X]).
    """
    labels = all_labels(scheme)
    points = np.empty(scheme.M, dtype=complex)
    ex = float(mean_block_gain)
    if scheme.kind == PSK:
        m = np.arange(scheme.M)
        points[:] = ex * np.exp(1j * TWO_PI * m / scheme.M)
        gains = np.array([ex + 0.0j])
    elif scheme.kind == APSK:
        for i, (l, v) in enumerate(labels):
            points[i] = np.exp(1j * TWO_PI * v / scheme.V) * (l * ex)
        gains = np.full(scheme.layers, ex, dtype=complex)
    else:
        q_rot = np.exp(1j * TWO_PI / scheme.V)
        for i, (l1, l2, v) in enumerate(labels):
            points[i] = np.exp(1j * TWO_PI * v / scheme.V) * (
                l1 * ex + q_rot * l2 * ex
            )
        gains = np.full((2, scheme.branch_layers), ex, dtype=complex)
    return ConstellationSet(
        points=points, labels=labels, scheme=scheme, block_gains=gains
    )
