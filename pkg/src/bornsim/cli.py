"""Command-line front end: run, oracle, compare, langevin.

Configuration comes from a flat JSON file (--config) with every value
overridable by a flag.  Exit codes: 0 success, 2 bad configuration or
input, 3 budget or state-space exceeded, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    batch_mean_se,
    born_rule_prediction,
    exact_absorption_solve,
)
from .continuous import ContinuousConfig, discrete_continuum_check
from .discrete import DiscreteGameConfig
from .ensemble import compute_stats, run_ensemble
from .errors import BudgetExceededError, StateSpaceTooLargeError
from .langevin import (
    LangevinConfig,
    LangevinTrajectory,
    momentum_autocorrelation,
    run_langevin,
)
from . import reports

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_IO = 4

DEFAULT_FORMATS = ("csv", "json")


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _csv_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _formats(text: str) -> tuple[str, ...]:
    items = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [x for x in items if x not in ("csv", "json")]
    if bad:
        raise ValueError(f"unknown output formats: {bad}")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bornsim",
        description="Gambler's-ruin martingale ensembles whose hitting "
        "frequencies reproduce the initial weights",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an ensemble and verdict it")
    run_p.add_argument("--config", type=Path, help="flat JSON config file")
    run_p.add_argument("--engine", choices=["discrete", "continuous"])
    run_p.add_argument("--fortunes", type=_csv_ints, help="discrete: initial integer fortunes")
    run_p.add_argument("--dice-faces", type=int)
    run_p.add_argument("--round-cap", type=int)
    run_p.add_argument("--initial", type=_csv_floats, help="continuous: initial simplex point")
    run_p.add_argument("--diffusion", type=float)
    run_p.add_argument("--dt", type=float)
    run_p.add_argument("--max-steps", type=int)
    run_p.add_argument("--runs", type=int)
    run_p.add_argument("--seed", type=int, help="master seed")
    run_p.add_argument("--workers", type=int, help="0 = one per CPU")
    run_p.add_argument("--sample-every", type=int)
    run_p.add_argument("--out", help="artifact path prefix")
    run_p.add_argument("--format", type=_formats, help="subset of csv,json")

    oracle_p = sub.add_parser("oracle", help="exact absorbing-chain solution")
    oracle_p.add_argument("--config", type=Path)
    oracle_p.add_argument("--fortunes", type=_csv_ints)
    oracle_p.add_argument("--schedule", choices=["round", "uniform"])
    oracle_p.add_argument("--max-states", type=int)
    oracle_p.add_argument("--out", help="artifact path prefix")

    cmp_p = sub.add_parser("compare", help="discrete vs continuous at matched diffusion")
    cmp_p.add_argument("--config", type=Path)
    cmp_p.add_argument("--n0", type=int, help="total fortune (sets the quantum 1/N0)")
    cmp_p.add_argument("--fortunes", type=_csv_ints)
    cmp_p.add_argument("--dt", type=float, help="duration of one game round")
    cmp_p.add_argument("--sde-substeps", type=int)
    cmp_p.add_argument("--runs", type=int)
    cmp_p.add_argument("--seed", type=int)
    cmp_p.add_argument("--workers", type=int)
    cmp_p.add_argument("--out", help="artifact path prefix")
    cmp_p.add_argument("--format", type=_formats)

    lan_p = sub.add_parser("langevin", help="classical Langevin reference run")
    lan_p.add_argument("--config", type=Path)
    lan_p.add_argument("--mass", type=float)
    lan_p.add_argument("--friction", type=float)
    lan_p.add_argument("--diffusion-p", type=float)
    lan_p.add_argument("--dt", type=float)
    lan_p.add_argument("--steps", type=int)
    lan_p.add_argument("--seed", type=int)
    lan_p.add_argument("--burn-in", type=float, help="time discarded before statistics")
    lan_p.add_argument("--lag", type=float, help="autocorrelation lag (default 1/friction)")
    lan_p.add_argument("--sample-every", type=int, help="series CSV decimation")
    lan_p.add_argument("--out", help="artifact path prefix")

    return parser


def _merge(args: argparse.Namespace, keys: dict) -> dict:
    """File values first, then flags; returns the merged settings dict."""
    merged = {}
    if args.config is not None:
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a flat JSON object")
        unknown = set(data) - set(keys)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    for key, flag in keys.items():
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value
    return merged


def _cmd_run(args) -> int:
    settings = _merge(
        args,
        {
            "engine": "engine",
            "fortunes0": "fortunes",
            "dice_faces": "dice_faces",
            "round_cap": "round_cap",
            "initial": "initial",
            "diffusion": "diffusion",
            "dt": "dt",
            "max_steps": "max_steps",
            "runs": "runs",
            "seed": "seed",
            "workers": "workers",
            "sample_every": "sample_every",
            "out": "out",
            "formats": "format",
        },
    )
    engine = settings.get("engine")
    if engine == "langevin":
        raise ValueError("use the langevin subcommand for the Langevin engine")
    if engine not in ("discrete", "continuous"):
        raise ValueError("engine must be discrete or continuous")
    runs = int(settings.get("runs", 0))
    if runs < 1:
        raise ValueError("runs must be at least 1")
    seed = int(settings.get("seed", 0))
    workers = int(settings.get("workers", 1))
    sample_every = int(settings.get("sample_every", 0))
    formats = tuple(settings.get("formats", DEFAULT_FORMATS))

    if engine == "discrete":
        if "fortunes0" not in settings:
            raise ValueError("discrete engine needs fortunes0")
        config = DiscreteGameConfig(
            fortunes0=tuple(settings["fortunes0"]),
            dice_faces=int(settings.get("dice_faces", 6)),
            round_cap=int(settings.get("round_cap", 10**9)),
        )
        born = born_rule_prediction(config.fortunes0)
        config_echo = {
            "fortunes0": list(config.fortunes0),
            "dice_faces": config.dice_faces,
            "round_cap": config.round_cap,
        }
        allowance = 0.0
        tau_unit = "rounds"
    else:
        if "initial" not in settings or "diffusion" not in settings or "dt" not in settings:
            raise ValueError("continuous engine needs initial, diffusion, dt")
        config = ContinuousConfig(
            initial=tuple(settings["initial"]),
            diffusion=float(settings["diffusion"]),
            dt=float(settings["dt"]),
            max_steps=int(settings.get("max_steps", 10**9)),
        )
        born = np.asarray(config.initial)
        config_echo = {
            "initial": list(config.initial),
            "diffusion": config.diffusion,
            "dt": config.dt,
            "max_steps": config.max_steps,
        }
        allowance = reports.CONTINUOUS_ALLOWANCE
        tau_unit = "time"

    result = run_ensemble(
        config, runs=runs, master_seed=seed, workers=workers, sample_every=sample_every
    )
    stats = compute_stats(result)
    verdict = reports.born_verdict(stats, born, allowance=allowance)
    sys.stdout.write(reports.verdict_text(engine, runs, stats, verdict))

    if settings.get("out"):
        prefix = Path(settings["out"])
        if "csv" in formats:
            reports.write_text(prefix.parent / f"{prefix.name}_summary.csv",
                               reports.summary_csv_text(stats))
        if "json" in formats:
            payload = reports.summary_json_dict(
                engine, config_echo, seed, stats, verdict, tau_unit
            )
            reports.write_text(prefix.parent / f"{prefix.name}_summary.json",
                               reports.json_text(payload))
        if sample_every > 0:
            reports.write_text(prefix.parent / f"{prefix.name}_trajectories.jsonl",
                               reports.trajectory_jsonl_text(result))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    settings = _merge(
        args,
        {
            "fortunes0": "fortunes",
            "schedule": "schedule",
            "max_states": "max_states",
            "out": "out",
        },
    )
    if "fortunes0" not in settings:
        raise ValueError("oracle needs fortunes0")
    config = DiscreteGameConfig(fortunes0=tuple(settings["fortunes0"]))
    schedule = settings.get("schedule", "round")
    max_states = int(settings.get("max_states", 10**6))
    solution = exact_absorption_solve(config, max_states=max_states, schedule=schedule)
    born = born_rule_prediction(config.fortunes0)
    gap = float(np.abs(solution.absorption_prob - born).max())
    sys.stdout.write(
        f"fortunes={tuple(config.fortunes0)} schedule={schedule} "
        f"states={solution.num_states}\n"
        f"oracle absorption: {[round(float(p), 12) for p in solution.absorption_prob]}\n"
        f"linear law:        {[round(float(b), 12) for b in born]}\n"
        f"max |difference| = {gap:.3e}\n"
        f"expected rounds  = {solution.expected_rounds!r}\n"
    )
    if settings.get("out"):
        prefix = Path(settings["out"])
        payload = {
            "fortunes0": list(config.fortunes0),
            "schedule": schedule,
            "born": [float(b) for b in born],
            "max_abs_difference": gap,
            **solution.to_json_dict(),
        }
        reports.write_text(prefix.parent / f"{prefix.name}_oracle.json",
                           reports.json_text(payload))
    return EXIT_OK


def _cmd_compare(args) -> int:
    settings = _merge(
        args,
        {
            "n0": "n0",
            "fortunes0": "fortunes",
            "dt": "dt",
            "sde_substeps": "sde_substeps",
            "runs": "runs",
            "seed": "seed",
            "workers": "workers",
            "out": "out",
            "formats": "format",
        },
    )
    for key in ("n0", "fortunes0", "dt"):
        if key not in settings:
            raise ValueError(f"compare needs {key}")
    report = discrete_continuum_check(
        N0=int(settings["n0"]),
        fortunes0=tuple(settings["fortunes0"]),
        dt=float(settings["dt"]),
        runs=int(settings.get("runs", 20000)),
        master_seed=int(settings.get("seed", 0)),
        workers=int(settings.get("workers", 1)),
        sde_substeps=int(settings.get("sde_substeps", 256)),
    )
    sys.stdout.write(reports.compare_text(report))
    formats = tuple(settings.get("formats", DEFAULT_FORMATS))
    if settings.get("out"):
        prefix = Path(settings["out"])
        if "csv" in formats:
            reports.write_text(prefix.parent / f"{prefix.name}_hits.csv",
                               reports.compare_csv_text(report))
            reports.write_text(prefix.parent / f"{prefix.name}_tau.csv",
                               reports.compare_tau_csv_text(report))
        if "json" in formats:
            payload = reports.compare_json_dict(report, int(settings.get("seed", 0)))
            reports.write_text(prefix.parent / f"{prefix.name}_compare.json",
                               reports.json_text(payload))
    return EXIT_OK


def _cmd_langevin(args) -> int:
    settings = _merge(
        args,
        {
            "mass": "mass",
            "friction": "friction",
            "diffusion_p": "diffusion_p",
            "dt": "dt",
            "steps": "steps",
            "seed": "seed",
            "burn_in": "burn_in",
            "lag": "lag",
            "sample_every": "sample_every",
            "out": "out",
        },
    )
    config = LangevinConfig(
        mass=float(settings.get("mass", 1.0)),
        friction=float(settings.get("friction", 1.0)),
        diffusion_p=float(settings.get("diffusion_p", 1.0)),
        dt=float(settings.get("dt", 0.01)),
        steps=int(settings.get("steps", 100000)),
        seed=int(settings.get("seed", 0)),
    )
    burn_in = float(settings.get("burn_in", 5.0 / config.friction))
    lag = float(settings.get("lag", 1.0 / config.friction))
    traj = run_langevin(config)
    skip = min(int(burn_in / config.dt), len(traj) - 2)
    p_tail = traj.p[skip:]
    p2_mean, p2_se = batch_mean_se(p_tail**2)
    expected_p2 = config.diffusion_p / config.friction
    tail = LangevinTrajectory(t=traj.t[skip:], r=traj.r[skip:], p=p_tail, dt=config.dt)
    autocorr = momentum_autocorrelation(tail, lag)
    sys.stdout.write(
        f"steps={config.steps} dt={config.dt:g} friction={config.friction:g} "
        f"diffusion_p={config.diffusion_p:g} burn_in={burn_in:g}\n"
        f"<p^2> = {p2_mean:.6g} +- {p2_se:.2g} (stationary value {expected_p2:g})\n"
        f"autocorr(lag={lag:g}) = {autocorr:.6g} "
        f"(exponential decay gives {math.exp(-config.friction * lag):.6g})\n"
    )
    if settings.get("out"):
        prefix = Path(settings["out"])
        every = max(int(settings.get("sample_every", 1)), 1)
        lines = ["t,r,p"]
        for k in range(0, len(traj), every):
            lines.append(f"{reports.fmt(float(traj.t[k]))},"
                         f"{reports.fmt(float(traj.r[k]))},{reports.fmt(float(traj.p[k]))}")
        reports.write_text(prefix.parent / f"{prefix.name}_series.csv",
                           "\n".join(lines) + "\n")
        payload = {
            "config": {
                "mass": config.mass,
                "friction": config.friction,
                "diffusion_p": config.diffusion_p,
                "dt": config.dt,
                "steps": config.steps,
                "seed": config.seed,
            },
            "burn_in": burn_in,
            "p2_mean": p2_mean,
            "p2_se": p2_se,
            "p2_expected": expected_p2,
            "autocorr_lag": lag,
            "autocorr": autocorr,
            "autocorr_expected": math.exp(-config.friction * lag),
        }
        reports.write_text(prefix.parent / f"{prefix.name}_summary.json",
                           reports.json_text(payload))
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "oracle": _cmd_oracle,
    "compare": _cmd_compare,
    "langevin": _cmd_langevin,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, TypeError, KeyError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BudgetExceededError, StateSpaceTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
