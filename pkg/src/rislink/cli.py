"""Command-line front end: validate a JSON job config, run it, write CSV.

Subcommands mirror the job kinds: ``constellation``, ``capacity``,
``sep``, ``theory``. Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .analysis import QuadratureRule, gain_moments, scheme_block_size
from .channel import LinkConfig, draw_channel, equivalent_link
from .errors import ConfigError, NumericalError
from .io import write_constellation_csv, write_sweep_csv
from .modulation import (
    PSK,
    SchemeConfig,
    partition_blocks,
    received_signal_set,
    statistical_signal_set,
    validate_scheme,
)
from .montecarlo import (
    SweepSpec,
    capacity_ub_sweep,
    simulate_capacity,
    simulate_sep,
    theory_sep_sweep,
)
from . import rng

JOB_KINDS = ("constellation", "capacity", "sep", "theory")

_TOP_KEYS = {"job", "link", "scheme", "sweep", "mode", "out"}
_LINK_DEFAULTS = {
    "K": 1,
    "kappa": 1.0,
    "B": 3,
    "ra_spacing_over_lambda": 0.5,
    "aoa_phi": 0.0,
    "rho": 1.0,
}
_SWEEP_DEFAULTS = {"channels_per_point": 1, "master_seed": 0}
_MODE_DEFAULTS = {
    "early_stop": False,
    "theory_averaging": "channel_average",
    "theory_channels": 100,
    "constellation_source": "statistical",
    "include_ub": True,
    "quadrature_order": 16,
}


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown field {key!r} in {where}")


def _with_defaults(section: dict, defaults: dict) -> dict:
    out = dict(defaults)
    out.update(section)
    return out


@dataclass
class JobConfig:
    job: str
    link: LinkConfig
    scheme: SchemeConfig
    sweep: dict
    mode: dict
    out: str

    def resolved(self) -> dict:
        """The full config (input plus defaults) for the provenance header."""
        cfg = {
            "job": self.job,
            "link": {
                "N": self.link.N,
                "K": self.link.K,
                "kappa": self.link.kappa,
                "B": self.link.B,
                "ra_spacing_over_lambda": self.link.ra_spacing_over_lambda,
                "aoa_phi": self.link.aoa_phi,
                "rho": self.link.rho,
            },
            "scheme": {"kind": self.scheme.kind, "M": self.scheme.M},
            "mode": dict(sorted(self.mode.items())),
        }
        if self.scheme.V is not None:
            cfg["scheme"]["V"] = self.scheme.V
        if self.sweep:
            cfg["sweep"] = dict(sorted(self.sweep.items()))
        return cfg


def load_job_config(
    path: str,
    job: str,
    out_override: str | None = None,
    seed_override: int | None = None,
) -> JobConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file is not valid JSON: {e}")
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config")

    if "job" in raw and raw["job"] != job:
        raise ConfigError(
            f"config job {raw['job']!r} does not match subcommand {job!r}"
        )

    link_raw = raw.get("link")
    if not isinstance(link_raw, dict) or "N" not in link_raw:
        raise ConfigError("config must provide link.N")
    _check_keys(link_raw, {"N"} | set(_LINK_DEFAULTS), "link")
    link = LinkConfig(**_with_defaults(link_raw, _LINK_DEFAULTS))

    scheme_raw = raw.get("scheme")
    if not isinstance(scheme_raw, dict) or "kind" not in scheme_raw or "M" not in scheme_raw:
        raise ConfigError("config must provide scheme.kind and scheme.M")
    _check_keys(scheme_raw, {"kind", "M", "V"}, "scheme")
    scheme = SchemeConfig(**scheme_raw)
    validate_scheme(scheme, link.N, link.B)

    sweep_raw = raw.get("sweep", {})
    _check_keys(
        sweep_raw,
        {"snr_grid_db", "trials_per_point"} | set(_SWEEP_DEFAULTS),
        "sweep",
    )
    sweep = _with_defaults(sweep_raw, _SWEEP_DEFAULTS)
    if seed_override is not None:
        sweep["master_seed"] = seed_override

    if job in ("capacity", "sep", "theory"):
        if "snr_grid_db" not in sweep:
            raise ConfigError(f"{job} job requires sweep.snr_grid_db")
        if not sweep["snr_grid_db"]:
            raise ConfigError("sweep.snr_grid_db must not be empty")
    if job in ("capacity", "sep") and "trials_per_point" not in sweep:
        raise ConfigError(f"{job} job requires sweep.trials_per_point")

    mode_raw = raw.get("mode", {})
    _check_keys(mode_raw, set(_MODE_DEFAULTS), "mode")
    mode = _with_defaults(mode_raw, _MODE_DEFAULTS)
    if mode["theory_averaging"] not in ("channel_average", "mean_gains"):
        raise ConfigError(
            f"mode.theory_averaging must be 'channel_average' or 'mean_gains': "
            f"{mode['theory_averaging']!r}"
        )
    if mode["constellation_source"] not in ("statistical", "realization"):
        raise ConfigError(
            f"mode.constellation_source must be 'statistical' or 'realization': "
            f"{mode['constellation_source']!r}"
        )

    out = out_override or raw.get("out")
    if not out:
        raise ConfigError("an output path is required (config 'out' or --out)")
    return JobConfig(job=job, link=link, scheme=scheme, sweep=sweep, mode=mode, out=out)


def _sweep_spec(cfg: JobConfig, need_trials: bool = True) -> SweepSpec:
    trials = cfg.sweep.get("trials_per_point", 1 if not need_trials else None)
    if trials is None:
        raise ConfigError(f"{cfg.job} job requires sweep.trials_per_point")
    return SweepSpec(
        link=cfg.link,
        scheme=cfg.scheme,
        snr_grid_db=tuple(cfg.sweep["snr_grid_db"]),
        trials_per_point=int(trials),
        channels_per_point=int(cfg.sweep["channels_per_point"]),
        master_seed=int(cfg.sweep["master_seed"]),
        early_stop=bool(cfg.mode["early_stop"]),
    )


def run_job(cfg: JobConfig, workers: int | None = None) -> None:
    resolved = cfg.resolved()
    if cfg.job == "constellation":
        if cfg.mode["constellation_source"] == "statistical":
            kappa_prime = equivalent_link(cfg.link).kappa_prime
            mean = gain_moments(
                scheme_block_size(cfg.scheme, cfg.link.N), cfg.link.B, kappa_prime
            ).mean
            const = statistical_signal_set(cfg.scheme, mean)
        else:
            gen = rng.stream(int(cfg.sweep["master_seed"]), rng.TAG_CHANNEL, 0, 0)
            ch = draw_channel(cfg.link, gen)
            part = partition_blocks(cfg.link.N, cfg.scheme)
            const = received_signal_set(ch, cfg.scheme, part, cfg.link.B)
        write_constellation_csv(cfg.out, const, resolved)
        return

    if cfg.job == "sep":
        result = simulate_sep(_sweep_spec(cfg), workers=workers)
        write_sweep_csv(cfg.out, result.rows, "sep", resolved)
        return

    if cfg.job == "capacity":
        spec = _sweep_spec(cfg)
        result = simulate_capacity(spec, workers=workers)
        rows = result.rows
        if cfg.mode["include_ub"] and cfg.scheme.kind != PSK:
            rule = QuadratureRule.gauss_hermite(int(cfg.mode["quadrature_order"]))
            rows = rows + capacity_ub_sweep(spec, rule).rows
        write_sweep_csv(cfg.out, rows, "capacity", resolved)
        return

    if cfg.job == "theory":
        spec = _sweep_spec(cfg, need_trials=False)
        result = theory_sep_sweep(
            spec,
            mode=cfg.mode["theory_averaging"],
            theory_channels=int(cfg.mode["theory_channels"]),
        )
        write_sweep_csv(cfg.out, result.rows, "theory", resolved)
        return

    raise ConfigError(f"unknown job kind: {cfg.job!r}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rislink",
        description="RIS link-level simulation jobs writing CSV artifacts",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in JOB_KINDS:
        sp = sub.add_parser(name, help=f"run a {name} job")
        sp.add_argument("--config", required=True, help="JSON job config path")
        sp.add_argument("--out", help="output CSV path (overrides config)")
        sp.add_argument("--seed", type=int, help="master seed (overrides config)")
        sp.add_argument("--workers", type=int, help="worker processes")
    args = parser.parse_args(argv)

    try:
        cfg = load_job_config(
            args.config, args.command, out_override=args.out, seed_override=args.seed
        )
        run_job(cfg, workers=args.workers)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
