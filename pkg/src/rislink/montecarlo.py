"""Seeded end-to-end simulation sweeps: SEP, capacity, and theory curves.

Work is split into tasks addressed by (SNR point, channel draw, round).
Every task derives its own random stream from the master seed and those
indices, so results are bit-identical for any worker count and tasks can
run in any order. Observations follow y = sqrt(rho') z + n with
n ~ CN(0, 1).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from . import rng
from .analysis import (
    QuadratureRule,
    dcmc_capacity_gh,
    dcmc_capacity_ub,
    gain_moments,
    scheme_block_size,
    sep_apsk_theory,
    sep_qapsk_theory,
)
from .channel import LinkConfig, db_to_linear, draw_channel, equivalent_link
from .detection import ml_detect_batch
from .errors import ConfigError
from .modulation import (
    APSK,
    PSK,
    SchemeConfig,
    partition_blocks,
    received_signal_set,
    validate_scheme,
)

SEP_SIM = "sep_sim"
SEP_THEORY = "sep_theory"
CAPACITY_SIM = "capacity_sim"
CAPACITY_UB = "capacity_ub"

_CHUNK = 16384


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: link template, scheme, SNR grid and sampling budget."""

    link: LinkConfig
    scheme: SchemeConfig
    snr_grid_db: tuple[float, ...]
    trials_per_point: int
    channels_per_point: int = 1
    master_seed: int = 0
    early_stop: bool = False
    early_stop_min_errors: int = 100
    early_stop_max_factor: int = 50

    def __post_init__(self):
        grid = tuple(float(s) for s in self.snr_grid_db)
        object.__setattr__(self, "snr_grid_db", grid)
        if len(grid) == 0:
            raise ConfigError("snr_grid_db must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"snr_grid_db must be strictly increasing: {grid}")
        if self.trials_per_point < 1:
            raise ConfigError(
                f"trials_per_point must be >= 1: {self.trials_per_point}"
            )
        if self.channels_per_point < 1:
            raise ConfigError(
                f"channels_per_point must be >= 1: {self.channels_per_point}"
            )
        validate_scheme(self.scheme, self.link.N, self.link.B)

    def rho_prime(self, point: int) -> float:
        link = replace(self.link, rho=db_to_linear(self.snr_grid_db[point]))
        return equivalent_link(link).rho_prime

    def channel_trials(self, chan: int) -> int:
        base, rem = divmod(self.trials_per_point, self.channels_per_point)
        return base + (1 if chan < rem else 0)


@dataclass(frozen=True)
class SweepRow:
    """One (SNR point, metric) record of a sweep."""

    snr_db: float
    metric: str
    value: float
    stderr: float | None = None
    trials: int | None = None
    channels: int | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def series(self, metric: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(snr_db, value, stderr) arrays for one metric, grid order."""
        sel = [r for r in self.rows if r.metric == metric]
        snr = np.array([r.snr_db for r in sel])
        val = np.array([r.value for r in sel])
        err = np.array(
            [r.stderr if r.stderr is not None else np.nan for r in sel]
        )
        return snr, val, err


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        return os.cpu_count() or 1
    if workers < 1:
        raise ConfigError(f"workers must be >= 1: {workers}")
    return workers


def _run_tasks(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futures = [ex.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]


def _constellation_for(spec: SweepSpec, point: int, chan: int):
    gen = rng.stream(spec.master_seed, rng.TAG_CHANNEL, point, chan)
    ch = draw_channel(spec.link, gen)
    part = partition_blocks(spec.link.N, spec.scheme)
    return received_signal_set(ch, spec.scheme, part, spec.link.B)


def _sep_round_task(
    spec: SweepSpec, point: int, chan: int, round_idx: int, size: int
) -> tuple[int, int, int, int]:
    """Simulate one chunk of symbols; returns (point, chan, errors, size)."""
    const = _constellation_for(spec, point, chan)
    rho_prime = spec.rho_prime(point)
    gen = rng.stream(spec.master_seed, rng.TAG_TRIALS, point, chan, round_idx)
    labels = gen.integers(0, spec.scheme.M, size=size)
    noise = (gen.standard_normal(size) + 1j * gen.standard_normal(size)) / np.sqrt(2.0)
    y = np.sqrt(rho_prime) * const.points[labels] + noise
    detected = ml_detect_batch(y, const, rho_prime)
    errors = int(np.count_nonzero(detected != labels))
    return point, chan, errors, size


def simulate_sep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Pooled symbol error probability per grid point.

    With early stopping a point keeps drawing whole rounds until it has
    both its trial budget and ``early_stop_min_errors`` errors, capped at
    ``early_stop_max_factor`` times the budget; points with fewer errors
    at the cap simply report what they saw.
    """
    workers = _resolve_workers(workers)
    points = len(spec.snr_grid_db)
    errors = np.zeros(points, dtype=np.int64)
    trials = np.zeros(points, dtype=np.int64)

    def planned_rounds(scale: int):
        tasks = []
        for p in range(points):
            for c in range(spec.channels_per_point):
                quota = spec.channel_trials(c) * scale
                r = 0
                done = 0
                while done < quota:
                    size = min(_CHUNK, quota - done)
                    tasks.append((p, c, r, size))
                    done += size
                    r += 1
        return tasks

    if not spec.early_stop:
        for p, _c, e, n in _run_tasks(_sep_round_task, [
            (spec, *t) for t in planned_rounds(1)
        ], workers):
            errors[p] += e
            trials[p] += n
    else:
        active = set(range(points))
        next_round = np.zeros((points, spec.channels_per_point), dtype=np.int64)
        while active:
            tasks = []
            for p in sorted(active):
                for c in range(spec.channels_per_point):
                    size = min(_CHUNK, max(1, spec.channel_trials(c)))
                    tasks.append((spec, p, c, int(next_round[p, c]), size))
                    next_round[p, c] += 1
            for p, _c, e, n in _run_tasks(_sep_round_task, tasks, workers):
                errors[p] += e
                trials[p] += n
            for p in list(active):
                budget_met = trials[p] >= spec.trials_per_point
                enough_errors = errors[p] >= spec.early_stop_min_errors
                capped = trials[p] >= spec.early_stop_max_factor * spec.trials_per_point
                if (budget_met and enough_errors) or capped:
                    active.discard(p)

    rows = []
    for p in range(points):
        sep = errors[p] / trials[p]
        stderr = float(np.sqrt(sep * (1.0 - sep) / trials[p]))
        rows.append(
            SweepRow(
                snr_db=spec.snr_grid_db[p],
                metric=SEP_SIM,
                value=float(sep),
                stderr=stderr,
                trials=int(trials[p]),
                channels=spec.channels_per_point,
            )
        )
    return SweepResult(rows=tuple(rows))


def _capacity_channel_task(
    spec: SweepSpec, point: int, chan: int, draws: int
) -> tuple[int, int, float, float]:
    """Monte Carlo mutual information for one channel draw.

    Returns (point, chan, estimate, within-channel variance of the
    estimate). Noise is drawn independently per reference symbol.
    """
    const = _constellation_for(spec, point, chan)
    rho_prime = spec.rho_prime(point)
    M = spec.scheme.M
    z = const.points
    gen = rng.stream(spec.master_seed, rng.TAG_TRIALS, point, chan)
    log2 = np.log(2.0)

    mean_sum = 0.0
    var_sum = 0.0
    for m1 in range(M):
        d = np.sqrt(rho_prime) * (z[m1] - z)  # (M,)
        nre = gen.standard_normal(draws)
        nim = gen.standard_normal(draws)
        n = (nre + 1j * nim) / np.sqrt(2.0)
        w = d[None, :] + n[:, None]
        expo = -np.abs(w) ** 2 + (np.abs(n) ** 2)[:, None]
        s = logsumexp(expo, axis=1) / log2  # log2 sum_m2 exp(...)
        mean_sum += s.mean()
        var_sum += s.var(ddof=1) / draws
    r = float(np.log2(M) - mean_sum / M)
    return point, chan, r, var_sum / M**2


def simulate_capacity(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Monte Carlo DCMC capacity per grid point, averaged over channels.

    ``trials_per_point`` is the noise-draw budget per reference symbol,
    split across channel draws. With two or more channels the reported
    standard error is the spread of per-channel estimates; with one it is
    the within-channel noise error.
    """
    workers = _resolve_workers(workers)
    points = len(spec.snr_grid_db)
    tasks = []
    for p in range(points):
        for c in range(spec.channels_per_point):
            draws = max(1, spec.channel_trials(c))
            tasks.append((spec, p, c, draws))
    estimates = [[None] * spec.channels_per_point for _ in range(points)]
    withins = np.zeros(points)
    for p, c, r, v in _run_tasks(_capacity_channel_task, tasks, workers):
        estimates[p][c] = r
        withins[p] += v / spec.channels_per_point**2

    rows = []
    for p in range(points):
        vals = np.array(estimates[p], dtype=float)
        value = float(vals.mean())
        if spec.channels_per_point >= 2:
            stderr = float(vals.std(ddof=1) / np.sqrt(len(vals)))
        else:
            stderr = float(np.sqrt(withins[p]))
        rows.append(
            SweepRow(
                snr_db=spec.snr_grid_db[p],
                metric=CAPACITY_SIM,
                value=value,
                stderr=stderr,
                trials=spec.trials_per_point,
                channels=spec.channels_per_point,
            )
        )
    return SweepResult(rows=tuple(rows))


def theory_sep_sweep(
    spec: SweepSpec,
    mode: str = "channel_average",
    theory_channels: int = 100,
) -> SweepResult:
    """Closed-form SEP curve for APSK/QAPSK.

    ``channel_average`` recomputes the block gains for ``theory_channels``
    independent draws and averages the formula; ``mean_gains`` evaluates
    it once at the expected block gain.
    """
    scheme = spec.scheme
    if scheme.kind == PSK:
        raise ConfigError("no closed-form SEP for PSK; use the sep job")
    if mode not in ("channel_average", "mean_gains"):
        raise ConfigError(f"unknown theory averaging mode: {mode!r}")
    part = partition_blocks(spec.link.N, scheme)
    kappa_prime = equivalent_link(spec.link).kappa_prime

    gain_sets: list[tuple[np.ndarray, np.ndarray | None]] = []
    if mode == "mean_gains":
        mean = gain_moments(
            scheme_block_size(scheme, spec.link.N), spec.link.B, kappa_prime
        ).mean
        if scheme.kind == APSK:
            gain_sets.append((np.full(scheme.layers, mean), None))
        else:
            per = np.full(scheme.branch_layers, mean)
            gain_sets.append((per, per.copy()))
        channels = 0
    else:
        if theory_channels < 1:
            raise ConfigError(f"theory_channels must be >= 1: {theory_channels}")
        for r in range(theory_channels):
            gen = rng.stream(spec.master_seed, rng.TAG_THEORY, r)
            ch = draw_channel(spec.link, gen)
            const = received_signal_set(ch, scheme, part, spec.link.B)
            if scheme.kind == APSK:
                gain_sets.append((const.block_gains.real, None))
            else:
                gain_sets.append(
                    (const.block_gains[0].real, const.block_gains[1].real)
                )
        channels = theory_channels

    rows = []
    for p, snr_db in enumerate(spec.snr_grid_db):
        rho_prime = spec.rho_prime(p)
        vals = []
        for xi, xq in gain_sets:
            if scheme.kind == APSK:
                vals.append(sep_apsk_theory(xi, rho_prime, scheme.M, scheme.V))
            else:
                vals.append(
                    sep_qapsk_theory(xi, xq, rho_prime, scheme.M, scheme.V)
                )
        rows.append(
            SweepRow(
                snr_db=snr_db,
                metric=SEP_THEORY,
                value=float(np.mean(vals)),
                stderr=None,
                trials=None,
                channels=channels,
            )
        )
    return SweepResult(rows=tuple(rows))


def capacity_ub_sweep(
    spec: SweepSpec, rule: QuadratureRule | None = None
) -> SweepResult:
    """Deterministic capacity upper bound curve from expected block gains."""
    scheme = spec.scheme
    if scheme.kind == PSK:
        raise ConfigError("capacity upper bound is defined for APSK/QAPSK only")
    kappa_prime = equivalent_link(spec.link).kappa_prime
    mean = gain_moments(
        scheme_block_size(scheme, spec.link.N), spec.link.B, kappa_prime
    ).mean
    rows = []
    for p, snr_db in enumerate(spec.snr_grid_db):
        value = dcmc_capacity_ub(scheme, mean, spec.rho_prime(p), rule)
        rows.append(
            SweepRow(snr_db=snr_db, metric=CAPACITY_UB, value=value)
        )
    return SweepResult(rows=tuple(rows))


def _gh_capacity_task(
    spec: SweepSpec, point: int, chan: int, order: int
) -> tuple[int, int, float]:
    const = _constellation_for(spec, point, chan)
    rule = QuadratureRule.gauss_hermite(order)
    return point, chan, dcmc_capacity_gh(const.points, spec.rho_prime(point), rule)


def capacity_curve_gh(
    spec: SweepSpec, workers: int | None = None, order: int = 16
) -> np.ndarray:
    """Per-point capacity: Gauss-Hermite value averaged over channel draws."""
    workers = _resolve_workers(workers)
    tasks = [
        (spec, p, c, order)
        for p in range(len(spec.snr_grid_db))
        for c in range(spec.channels_per_point)
    ]
    acc = np.zeros(len(spec.snr_grid_db))
    for p, _c, r in _run_tasks(_gh_capacity_task, tasks, workers):
        acc[p] += r / spec.channels_per_point
    return acc


def crossover_scan(
    spec_ref: SweepSpec,
    spec_new: SweepSpec,
    workers: int | None = None,
    order: int = 16,
) -> float | None:
    """SNR (dB) where spec_new's capacity first exceeds spec_ref's.

    Both specs must share the grid, M, N and B. The crossing is linearly
    interpolated between grid points; None when the new scheme never
    exceeds the reference on the grid.
    """
    if spec_ref.snr_grid_db != spec_new.snr_grid_db:
        raise ConfigError("crossover_scan requires identical SNR grids")
    for attr, a, b in (
        ("M", spec_ref.scheme.M, spec_new.scheme.M),
        ("N", spec_ref.link.N, spec_new.link.N),
        ("B", spec_ref.link.B, spec_new.link.B),
    ):
        if a != b:
            raise ConfigError(f"crossover_scan requires equal {attr}: {a} != {b}")
    cap_ref = capacity_curve_gh(spec_ref, workers, order)
    cap_new = capacity_curve_gh(spec_new, workers, order)
    diff = cap_new - cap_ref
    above = np.nonzero(diff > 0)[0]
    if len(above) == 0:
        return None
    i = int(above[0])
    grid = spec_ref.snr_grid_db
    if i == 0:
        return grid[0]
    t = -diff[i - 1] / (diff[i] - diff[i - 1])
    return float(grid[i - 1] + t * (grid[i] - grid[i - 1]))
