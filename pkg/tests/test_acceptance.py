"""Acceptance suite: one test per criterion, at the stated tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  Stochastic criteria use the fixed master seeds below, so the
suite is deterministic; tolerances are the stated ones, not tuned.
"""

import json
import math
from itertools import product

import numpy as np
import pytest

from bornsim.analysis import (
    batch_mean_se,
    born_rule_prediction,
    exact_absorption_solve,
    expected_ruin_time_two_player,
)
from bornsim.cli import main as cli_main
from bornsim.continuous import ContinuousConfig, discrete_continuum_check
from bornsim.discrete import DiscreteGameConfig
from bornsim.ensemble import compute_stats, run_ensemble
from bornsim.langevin import LangevinConfig, LangevinTrajectory, momentum_autocorrelation, run_langevin

SEED_DISCRETE = 20260810
SEED_CONTINUOUS = 20260811
SEED_COMPARE = 20260812
SEED_TAU = 20260813
SEED_LANGEVIN = 20260814

DISCRETE_FORTUNES = (2, 3, 5)
DISCRETE_RUNS = 100_000

CONTINUOUS_INITIAL = (0.3, 0.7)
CONTINUOUS_DIFFUSION = 0.5
CONTINUOUS_DT = 1.5625e-4  # sqrt(2 * 0.5 * dt) = 0.0125 exactly
CONTINUOUS_RUNS = 10_000


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def discrete_ensemble():
    cfg = DiscreteGameConfig(fortunes0=DISCRETE_FORTUNES)
    result = run_ensemble(cfg, runs=DISCRETE_RUNS, master_seed=SEED_DISCRETE, workers=1)
    return result, compute_stats(result)


@pytest.fixture(scope="module")
def continuous_ensemble():
    cfg = ContinuousConfig(
        initial=CONTINUOUS_INITIAL, diffusion=CONTINUOUS_DIFFUSION, dt=CONTINUOUS_DT
    )
    result = run_ensemble(cfg, runs=CONTINUOUS_RUNS, master_seed=SEED_CONTINUOUS, workers=1)
    return result, compute_stats(result)


def test_criterion_1_born_rule_discrete(discrete_ensemble):
    result, stats = discrete_ensemble
    born = born_rule_prediction(DISCRETE_FORTUNES)
    se = np.sqrt(born * (1 - born) / result.runs)
    devs = np.abs(stats.freq - born)
    ok = bool(np.all(devs <= 4 * se))
    _report(
        1, ok,
        f"discrete {DISCRETE_FORTUNES} x {result.runs}: freq={np.round(stats.freq, 5)} "
        f"vs born={born}, max dev={devs.max():.5f}, 4SE={np.round(4 * se, 5)}",
    )


def test_criterion_2_exact_oracle_agreement():
    worst2 = 0.0
    for n0 in range(1, 33):
        for ni in range(n0 + 1):
            cfg = DiscreteGameConfig(fortunes0=(ni, n0 - ni))
            sol = exact_absorption_solve(cfg)
            worst2 = max(worst2, float(np.abs(sol.absorption_prob - born_rule_prediction(cfg.fortunes0)).max()))
    worst3 = 0.0
    for n0 in range(1, 13):
        for a, b in product(range(n0 + 1), repeat=2):
            c = n0 - a - b
            if c < 0:
                continue
            cfg = DiscreteGameConfig(fortunes0=(a, b, c))
            sol = exact_absorption_solve(cfg)
            worst3 = max(worst3, float(np.abs(sol.absorption_prob - born_rule_prediction(cfg.fortunes0)).max()))
    ok = worst2 <= 1e-10 and worst3 <= 1e-8
    _report(
        2, ok,
        f"oracle vs linear law: worst n=2 (N0<=32) dev={worst2:.2e} (<=1e-10), "
        f"worst n=3 (N0<=12) dev={worst3:.2e} (<=1e-8)",
    )


def test_criterion_3_born_rule_continuous(continuous_ensemble):
    result, stats = continuous_ensemble
    cfg_std = math.sqrt(2 * CONTINUOUS_DIFFUSION * CONTINUOUS_DT)
    assert cfg_std <= 0.0125 + 1e-15
    born = np.asarray(CONTINUOUS_INITIAL)
    se = np.sqrt(born * (1 - born) / result.runs)
    devs = np.abs(stats.freq - born)
    tol = 4 * se + 0.01
    ok = bool(np.all(devs <= tol))
    _report(
        3, ok,
        f"continuous {CONTINUOUS_INITIAL} x {result.runs} (step std {cfg_std:g}): "
        f"freq={np.round(stats.freq, 5)}, max dev={devs.max():.5f}, tol={np.round(tol, 5)}",
    )


def test_criterion_4_continuum_limit():
    report = discrete_continuum_check(
        N0=10, fortunes0=(3, 7), dt=1e-3, runs=20_000,
        master_seed=SEED_COMPARE, workers=1, sde_substeps=256,
    )
    ok = bool(
        report.joint_consistent.all()
        and report.born_in_discrete_ci.all()
        and report.born_in_continuous_ci.all()
    )
    _report(
        4, ok,
        f"compare N0=10 (3,7): discrete={np.round(report.discrete_stats.freq, 4)} "
        f"continuous={np.round(report.continuous_stats.freq, 4)} vs (0.3, 0.7); "
        f"joint={report.joint_consistent.tolist()}, "
        f"in discrete CI={report.born_in_discrete_ci.tolist()}, "
        f"in continuous CI={report.born_in_continuous_ci.tolist()}",
    )


def test_criterion_5_optional_stopping(discrete_ensemble, continuous_ensemble):
    details = []
    ok = True
    for label, (result, stats), initial in (
        ("discrete", discrete_ensemble, born_rule_prediction(DISCRETE_FORTUNES)),
        ("continuous", continuous_ensemble, np.asarray(CONTINUOUS_INITIAL)),
    ):
        se = np.sqrt(initial * (1 - initial) / result.runs)
        z = np.abs(stats.stopped_mean - initial) / se
        ok = ok and bool(np.all(z <= 4))
        details.append(f"{label} |z|={np.round(z, 2)}")
    _report(5, ok, "stopped mean vs initial: " + "; ".join(details))


def test_criterion_6_martingale_property(discrete_ensemble, continuous_ensemble):
    details = []
    ok = True
    for label, (result, stats) in (
        ("discrete", discrete_ensemble),
        ("continuous", continuous_ensemble),
    ):
        assert np.all(result.inc_count >= 1000)
        z = np.abs(stats.martingale_z)
        ok = ok and bool(np.all(z <= 4))
        details.append(f"{label} |z|={np.round(z, 2)}")
    _report(6, ok, "pooled active-step increments: " + "; ".join(details))


def test_criterion_7_trace_conservation(continuous_ensemble):
    # discrete: the engines assert exact conservation at every sub-round;
    # check the sampled fortunes of a full ensemble on top of that
    sampled = run_ensemble(
        DiscreteGameConfig(fortunes0=DISCRETE_FORTUNES),
        runs=500, master_seed=SEED_DISCRETE, sample_every=1,
    )
    exact = all(
        sum(fortunes) == 10
        for traj in sampled.samples
        for _, fortunes in traj
    )
    result, _ = continuous_ensemble
    drift = result.max_trace_drift
    ok = exact and drift <= 1e-9
    _report(
        7, ok,
        f"discrete trace exact over {sum(len(t) for t in sampled.samples)} sampled "
        f"sub-round states (engine asserts every sub-round); continuous max "
        f"|trace-1|={drift:.2e} (<=1e-9)",
    )


def test_criterion_8_stopping_time_oracle():
    oracle = expected_ruin_time_two_player(5, 10)
    result = run_ensemble(
        DiscreteGameConfig(fortunes0=(5, 5)), runs=100_000, master_seed=SEED_TAU
    )
    duels = result.clocks[:, 0].astype(np.float64)  # n=2: every round is a duel
    mean = duels.mean()
    se = duels.std(ddof=1) / math.sqrt(duels.size)
    ok = abs(mean - oracle) <= 4 * se
    _report(
        8, ok,
        f"(5,5) mean duels on gambler 1's clock: {mean:.3f} vs oracle {oracle:.1f} "
        f"(4SE={4 * se:.3f})",
    )


def test_criterion_9_langevin_reference():
    cfg = LangevinConfig(
        mass=1.0, friction=1.0, diffusion_p=1.0, dt=0.01, steps=1_000_000,
        seed=SEED_LANGEVIN,
    )
    assert cfg.friction * cfg.dt == pytest.approx(0.01)
    traj = run_langevin(cfg)
    skip = int(5.0 / cfg.dt)
    tail = LangevinTrajectory(t=traj.t[skip:], r=traj.r[skip:], p=traj.p[skip:], dt=cfg.dt)
    p2_mean, p2_se = batch_mean_se(tail.p**2, n_blocks=64)
    p2_ok = abs(p2_mean - 1.0) <= 4 * p2_se

    blocks = np.array_split(tail.p, 16)
    estimates = [
        momentum_autocorrelation(
            LangevinTrajectory(t=tail.t[: len(b)], r=tail.r[: len(b)], p=b, dt=cfg.dt), 1.0
        )
        for b in blocks
    ]
    ac_se = float(np.std(estimates, ddof=1) / math.sqrt(len(estimates)))
    ac = momentum_autocorrelation(tail, 1.0)
    ac_ok = abs(ac - math.exp(-1.0)) <= 4 * ac_se
    ok = p2_ok and ac_ok
    _report(
        9, ok,
        f"<p^2>={p2_mean:.4f}+-{p2_se:.4f} vs 1.0; "
        f"autocorr(1/friction)={ac:.4f}+-{ac_se:.4f} vs {math.exp(-1):.4f}",
    )


def test_criterion_10_determinism_across_workers(tmp_path):
    artifacts = {}
    for workers in (1, 8):
        prefix = tmp_path / f"w{workers}" / "born"
        code = cli_main([
            "run", "--engine", "discrete", "--fortunes", "2,3,5",
            "--runs", str(DISCRETE_RUNS), "--seed", str(SEED_DISCRETE),
            "--workers", str(workers), "--out", str(prefix),
        ])
        assert code == 0
        artifacts[workers] = (
            (tmp_path / f"w{workers}" / "born_summary.csv").read_bytes(),
            (tmp_path / f"w{workers}" / "born_summary.json").read_bytes(),
        )
    ok = artifacts[1] == artifacts[8]
    _report(
        10, ok,
        f"workers=1 vs workers=8 summary artifacts byte-identical: "
        f"csv {len(artifacts[1][0])} bytes, json {len(artifacts[1][1])} bytes",
    )
