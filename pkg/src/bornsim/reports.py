"""Artifact emission and verdict logic for the CLI.

CSV columns and JSON field names are a stable interface (documented in the
README).  Artifacts carry no timestamps, worker counts, or backend names:
a fixed master seed must produce byte-identical files regardless of
parallelism.  Component indices are 0-based in JSON; the CSV `gambler`
column uses 1-based labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import EnsembleStats
from .continuous import ComparisonReport
from .ensemble import EnsembleResult
from .rng import RNG_FAMILY, RNG_VERSION, SEED_MIX

SUMMARY_CSV_COLUMNS = ("gambler", "wins", "runs", "frequency", "wilson_low", "wilson_high")
VERDICT_SE_MULTIPLE = 4.0
# Endpoint-crossing absorption bias allowance for the continuous engine,
# valid in the step-std <= 0.0125 regime the config warning steers toward.
CONTINUOUS_ALLOWANCE = 0.01

RNG_METADATA = {"family": RNG_FAMILY, "version": RNG_VERSION, "seed_mix": SEED_MIX}


def fmt(x) -> str:
    """Shortest round-trip decimal for floats, plain str otherwise."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


@dataclass(frozen=True)
class Verdict:
    born: np.ndarray
    tolerance: np.ndarray
    passed: np.ndarray  # per component

    @property
    def all_passed(self) -> bool:
        return bool(np.all(self.passed))


def born_verdict(stats: EnsembleStats, born, allowance: float = 0.0) -> Verdict:
    """Per-component check |frequency - born| <= 4 SE(born) + allowance.

    Uses only numbers present in the summary artifact, so the verdict can
    be recomputed from the files alone.
    """
    born = np.asarray(born, dtype=np.float64)
    se = np.sqrt(born * (1.0 - born) / stats.runs)
    tol = VERDICT_SE_MULTIPLE * se + allowance
    passed = np.abs(stats.freq - born) <= tol
    exact = se == 0.0  # born 0 or 1: must match exactly, allowance aside
    passed = np.where(exact, np.abs(stats.freq - born) <= allowance, passed)
    return Verdict(born=born, tolerance=tol, passed=passed)


def summary_csv_text(stats: EnsembleStats) -> str:
    lines = [",".join(SUMMARY_CSV_COLUMNS)]
    for i in range(len(stats.wins)):
        lines.append(
            ",".join(
                [
                    str(i + 1),
                    str(int(stats.wins[i])),
                    str(stats.runs),
                    fmt(float(stats.freq[i])),
                    fmt(float(stats.wilson_low[i])),
                    fmt(float(stats.wilson_high[i])),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def summary_json_dict(
    engine: str,
    engine_config: dict,
    master_seed: int,
    stats: EnsembleStats,
    verdict: Verdict,
    tau_unit: str,
) -> dict:
    return {
        "engine": engine,
        "config": engine_config,
        "master_seed": int(master_seed),
        "tau_unit": tau_unit,
        "rng": dict(RNG_METADATA),
        "stats": stats.to_json_dict(),
        "born": [float(b) for b in verdict.born],
        "verdict": {
            "tolerance": [float(t) for t in verdict.tolerance],
            "per_component": [bool(p) for p in verdict.passed],
            "pass": verdict.all_passed,
        },
    }


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def verdict_text(engine: str, runs: int, stats: EnsembleStats, verdict: Verdict) -> str:
    lines = [
        f"engine={engine} runs={runs}",
        f"{'gambler':>7}  {'wins':>9}  {'frequency':>10}  {'born':>8}  "
        f"{'wilson95':>22}  verdict",
    ]
    for i in range(len(stats.wins)):
        interval = f"[{stats.wilson_low[i]:.5f}, {stats.wilson_high[i]:.5f}]"
        lines.append(
            f"{i + 1:>7}  {int(stats.wins[i]):>9}  {stats.freq[i]:>10.5f}  "
            f"{verdict.born[i]:>8.5f}  {interval:>22}  "
            f"{'PASS' if verdict.passed[i] else 'FAIL'}"
        )
    lines.append(f"overall: {'PASS' if verdict.all_passed else 'FAIL'} "
                 f"(|frequency - born| within {VERDICT_SE_MULTIPLE:g} binomial SE)")
    return "\n".join(lines) + "\n"


def trajectory_jsonl_text(result: EnsembleResult) -> str:
    """One JSON object per trajectory: outcome, duration, optional samples."""
    if result.samples is None:
        raise ValueError("ensemble was run without sampling")
    lines = []
    for idx in range(result.runs):
        record: dict = {"index": idx, "outcome": int(result.outcomes[idx])}
        if result.engine == "discrete":
            record["rounds"] = int(result.taus[idx])
            record["clocks"] = [int(c) for c in result.clocks[idx]]
            record["samples"] = [[int(r), [int(f) for f in fs]] for r, fs in result.samples[idx]]
        else:
            record["steps"] = int(result.taus[idx])
            record["stopping_time"] = float(result.taus[idx] * result.tau_scale)
            record["samples"] = [
                [float(t), [float(v) for v in vs]] for t, vs in result.samples[idx]
            ]
        lines.append(json.dumps(record, sort_keys=True, allow_nan=False))
    return "\n".join(lines) + "\n"


COMPARE_CSV_COLUMNS = (
    "gambler",
    "born",
    "discrete_freq",
    "discrete_wilson_low",
    "discrete_wilson_high",
    "continuous_freq",
    "continuous_wilson_low",
    "continuous_wilson_high",
    "joint_consistent",
)


def compare_csv_text(report: ComparisonReport) -> str:
    lines = [",".join(COMPARE_CSV_COLUMNS)]
    d, c = report.discrete_stats, report.continuous_stats
    for i in range(len(report.fortunes0)):
        lines.append(
            ",".join(
                [
                    str(i + 1),
                    fmt(float(report.born[i])),
                    fmt(float(d.freq[i])),
                    fmt(float(d.wilson_low[i])),
                    fmt(float(d.wilson_high[i])),
                    fmt(float(c.freq[i])),
                    fmt(float(c.wilson_low[i])),
                    fmt(float(c.wilson_high[i])),
                    str(bool(report.joint_consistent[i])).lower(),
                ]
            )
        )
    return "\n".join(lines) + "\n"


COMPARE_TAU_CSV_COLUMNS = ("engine", "tau_mean_time", "tau_se_time", "runs")


def compare_tau_csv_text(report: ComparisonReport) -> str:
    lines = [",".join(COMPARE_TAU_CSV_COLUMNS)]
    for engine, (mean, se) in (
        ("discrete", report.discrete_tau_time),
        ("continuous", report.continuous_tau_time),
    ):
        lines.append(",".join([engine, fmt(mean), fmt(se), str(report.runs)]))
    return "\n".join(lines) + "\n"


def compare_json_dict(report: ComparisonReport, master_seed: int) -> dict:
    return {
        "fortunes0": list(report.fortunes0),
        "born": [float(b) for b in report.born],
        "round_dt": float(report.round_dt),
        "diffusion": float(report.diffusion),
        "sde_dt": float(report.sde_dt),
        "runs": int(report.runs),
        "master_seed": int(master_seed),
        "rng": dict(RNG_METADATA),
        "discrete": report.discrete_stats.to_json_dict(),
        "continuous": report.continuous_stats.to_json_dict(),
        "discrete_tau_time": [float(x) for x in report.discrete_tau_time],
        "continuous_tau_time": [float(x) for x in report.continuous_tau_time],
        "joint_consistent": [bool(b) for b in report.joint_consistent],
        "born_in_discrete_ci": [bool(b) for b in report.born_in_discrete_ci],
        "born_in_continuous_ci": [bool(b) for b in report.born_in_continuous_ci],
    }


def compare_text(report: ComparisonReport) -> str:
    d, c = report.discrete_stats, report.continuous_stats
    lines = [
        f"matched ensembles: fortunes={report.fortunes0} runs={report.runs} "
        f"round_dt={report.round_dt:g} D={report.diffusion:g} sde_dt={report.sde_dt:g}",
        f"{'gambler':>7}  {'born':>7}  {'discrete':>20}  {'continuous':>20}  joint",
    ]
    for i in range(len(report.fortunes0)):
        dcol = f"{d.freq[i]:.4f} [{d.wilson_low[i]:.4f},{d.wilson_high[i]:.4f}]"
        ccol = f"{c.freq[i]:.4f} [{c.wilson_low[i]:.4f},{c.wilson_high[i]:.4f}]"
        lines.append(
            f"{i + 1:>7}  {report.born[i]:>7.4f}  {dcol:>20}  {ccol:>20}  "
            f"{'ok' if report.joint_consistent[i] else 'DISAGREE'}"
        )
    dm, dse = report.discrete_tau_time
    cm, cse = report.continuous_tau_time
    lines.append(f"stopping time (process time units): discrete {dm:.4g} +- {dse:.2g}, "
                 f"continuous {cm:.4g} +- {cse:.2g}")
    return "\n".join(lines) + "\n"


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
