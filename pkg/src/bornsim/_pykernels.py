"""Pure-Python trajectory kernels (fallback backend).

Same chunk interface and identical random streams as the compiled
bornsim._kernels module; used when the extension is not built or when
BORNSIM_BACKEND=python is set.  Slower by roughly two orders of magnitude,
so ensembles sized for the compiled backend take correspondingly longer.
"""

from __future__ import annotations

import numpy as np

from .continuous import ContinuousConfig, run_sde
from .discrete import DiscreteGameConfig, run_game
from .rng import Xoshiro256pp, sub_seed

BACKEND_NAME = "python"


def run_discrete_chunk(
    fortunes0,
    dice_faces: int,
    master_seed: int,
    start_index: int,
    count: int,
    round_cap: int,
    sample_every: int,
) -> dict:
    n = len(fortunes0)
    config = DiscreteGameConfig(
        fortunes0=tuple(int(x) for x in fortunes0),
        dice_faces=dice_faces,
        round_cap=round_cap,
    )
    outcomes = np.empty(count, dtype=np.int64)
    taus = np.empty(count, dtype=np.int64)
    clocks = np.empty((count, n), dtype=np.int64)
    inc_count = np.zeros(n, dtype=np.int64)
    inc_sum = np.zeros(n, dtype=np.float64)
    inc_sumsq = np.zeros(n, dtype=np.float64)
    samples = [] if sample_every > 0 else None
    for t in range(count):
        rng = Xoshiro256pp(sub_seed(master_seed, start_index + t))
        traj = run_game(config, rng=rng, sample_every=sample_every)
        outcomes[t] = traj.outcome
        taus[t] = traj.rounds
        clocks[t] = traj.subrounds_per_gambler
        inc_count += traj.inc_count
        inc_sum += traj.inc_sum
        inc_sumsq += traj.inc_sumsq
        if samples is not None:
            samples.append(traj.samples)
    return {
        "outcomes": outcomes,
        "taus": taus,
        "clocks": clocks,
        "inc_count": inc_count,
        "inc_sum": inc_sum,
        "inc_sumsq": inc_sumsq,
        "max_drift": 0.0,
        "samples": samples,
    }


def run_continuous_chunk(
    initial,
    diffusion: float,
    dt: float,
    master_seed: int,
    start_index: int,
    count: int,
    max_steps: int,
    sample_every: int,
) -> dict:
    n = len(initial)
    config = ContinuousConfig(
        initial=tuple(float(x) for x in initial),
        diffusion=diffusion,
        dt=dt,
        max_steps=max_steps,
        step_warn_fraction=float("inf"),  # callers warn once at config build
    )
    outcomes = np.empty(count, dtype=np.int64)
    taus = np.empty(count, dtype=np.int64)
    inc_count = np.zeros(n, dtype=np.int64)
    inc_sum = np.zeros(n, dtype=np.float64)
    inc_sumsq = np.zeros(n, dtype=np.float64)
    max_drift = 0.0
    samples = [] if sample_every > 0 else None
    for t in range(count):
        rng = Xoshiro256pp(sub_seed(master_seed, start_index + t))
        traj = run_sde(config, rng=rng, sample_every=sample_every)
        outcomes[t] = traj.outcome
        taus[t] = traj.steps
        inc_count += traj.inc_count
        inc_sum += traj.inc_sum
        inc_sumsq += traj.inc_sumsq
        if traj.max_trace_drift > max_drift:
            max_drift = traj.max_trace_drift
        if samples is not None:
            samples.append(traj.samples)
    return {
        "outcomes": outcomes,
        "taus": taus,
        "clocks": None,
        "inc_count": inc_count,
        "inc_sum": inc_sum,
        "inc_sumsq": inc_sumsq,
        "max_drift": max_drift,
        "samples": samples,
    }
