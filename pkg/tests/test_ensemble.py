import math

import numpy as np
import pytest

import bornsim.ensemble as ensemble
from bornsim.continuous import ContinuousConfig
from bornsim.discrete import DiscreteGameConfig
from bornsim.ensemble import compute_stats, run_ensemble


def test_rejects_zero_runs():
    with pytest.raises(ValueError):
        run_ensemble(DiscreteGameConfig(fortunes0=(1, 1)), runs=0, master_seed=1)


def test_rejects_unknown_config():
    with pytest.raises(TypeError):
        run_ensemble(object(), runs=10, master_seed=1)


def test_results_independent_of_worker_count(monkeypatch):
    # small fixed chunks so several chunks exist even for a small ensemble
    monkeypatch.setattr(ensemble, "CHUNK_SIZE", 64)
    cfg = DiscreteGameConfig(fortunes0=(2, 3))
    results = [
        run_ensemble(cfg, runs=500, master_seed=99, workers=w) for w in (1, 2, 4)
    ]
    base = results[0]
    for other in results[1:]:
        assert np.array_equal(base.outcomes, other.outcomes)
        assert np.array_equal(base.taus, other.taus)
        assert np.array_equal(base.clocks, other.clocks)
        assert np.array_equal(base.inc_sum, other.inc_sum)
        assert np.array_equal(base.inc_sumsq, other.inc_sumsq)


def test_chunking_invisible_in_results(monkeypatch):
    cfg = DiscreteGameConfig(fortunes0=(2, 2))
    whole = run_ensemble(cfg, runs=300, master_seed=5)
    monkeypatch.setattr(ensemble, "CHUNK_SIZE", 17)  # awkward chunk boundary
    chopped = run_ensemble(cfg, runs=300, master_seed=5)
    assert np.array_equal(whole.outcomes, chopped.outcomes)
    assert np.array_equal(whole.taus, chopped.taus)
    assert np.array_equal(whole.inc_sum, chopped.inc_sum)


def test_trajectory_seeds_depend_only_on_index():
    cfg = DiscreteGameConfig(fortunes0=(3, 7))
    r1 = run_ensemble(cfg, runs=50, master_seed=7)
    r2 = run_ensemble(cfg, runs=200, master_seed=7)
    assert np.array_equal(r1.outcomes, r2.outcomes[:50])
    assert np.array_equal(r1.taus, r2.taus[:50])


def test_stats_computation():
    cfg = DiscreteGameConfig(fortunes0=(1, 3))
    result = run_ensemble(cfg, runs=4000, master_seed=13)
    stats = compute_stats(result)
    assert stats.wins.sum() == 4000
    assert stats.freq.sum() == pytest.approx(1.0)
    assert np.all(stats.wilson_low <= stats.freq)
    assert np.all(stats.freq <= stats.wilson_high)
    assert np.array_equal(stats.stopped_mean, stats.freq)
    # manual tau moments
    assert stats.tau_mean == pytest.approx(result.taus.mean())
    assert stats.tau_var == pytest.approx(result.taus.var(ddof=1))
    assert abs(stats.freq[0] - 0.25) < 4 * math.sqrt(0.25 * 0.75 / 4000)


def test_sampling_keeps_every_trajectory():
    cfg = DiscreteGameConfig(fortunes0=(1, 2))
    result = run_ensemble(cfg, runs=25, master_seed=3, sample_every=1)
    assert len(result.samples) == 25
    for idx in range(25):
        rounds, fortunes = result.samples[idx][-1]
        assert rounds == result.taus[idx]
        assert fortunes[result.outcomes[idx]] == 3


def test_monte_carlo_converges_toward_oracle():
    # matched master seed: the 1e3 ensemble is a prefix of the 1e5 one, so
    # the deviation from the exact law must not grow with more runs
    from bornsim.analysis import born_rule_prediction

    cfg = DiscreteGameConfig(fortunes0=(2, 3, 5))
    born = born_rule_prediction(cfg.fortunes0)
    devs = {}
    for runs in (1_000, 10_000, 100_000):
        result = run_ensemble(cfg, runs=runs, master_seed=101)
        freq = np.bincount(result.outcomes, minlength=3) / runs
        devs[runs] = np.abs(freq - born).max()
        assert devs[runs] < 4 * math.sqrt(0.25 / runs)
    assert devs[100_000] <= devs[1_000]


def test_continuous_ensemble_tau_scale():
    cfg = ContinuousConfig(initial=(0.4, 0.6), diffusion=0.5, dt=1e-3)
    result = run_ensemble(cfg, runs=100, master_seed=21)
    stats = compute_stats(result)
    assert result.tau_scale == cfg.dt
    assert stats.tau_mean == pytest.approx(result.taus.mean() * cfg.dt)
    assert result.max_trace_drift < 1e-10
