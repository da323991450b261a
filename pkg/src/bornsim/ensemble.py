"""Reproducible parallel ensembles over the trajectory kernels.

Work is cut into fixed-size chunks of trajectory indices; each chunk is
reduced by the kernel in index order and chunk results are folded in chunk
order.  Because the chunk size is a constant (not derived from the worker
count) and trajectory i always draws from sub_seed(master_seed, i), the
assembled result is bit-identical for any worker count or scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import backend
from .analysis import EnsembleStats, martingale_z_from_stats, wilson_interval
from .continuous import ContinuousConfig
from .discrete import DiscreteGameConfig

CHUNK_SIZE = 4096  # fixed: chunk boundaries must not depend on worker count

EngineConfig = Union[DiscreteGameConfig, ContinuousConfig]


@dataclass
class EnsembleResult:
    """Per-trajectory outcomes plus pooled increment statistics."""

    engine: str
    runs: int
    initial: np.ndarray  # probability vector
    outcomes: np.ndarray  # int64[runs], 0-based winner
    taus: np.ndarray  # int64[runs], rounds (discrete) or steps (continuous)
    tau_scale: float  # multiply taus by this for process time
    clocks: Optional[np.ndarray]  # int64[runs, n], discrete only
    inc_count: np.ndarray
    inc_sum: np.ndarray
    inc_sumsq: np.ndarray
    max_trace_drift: float
    samples: Optional[list]  # per trajectory, when sampling

    @property
    def n(self) -> int:
        return self.initial.shape[0]


def _chunk_payload(config: EngineConfig, master_seed: int, start: int, count: int, sample_every: int):
    if isinstance(config, DiscreteGameConfig):
        return (
            "discrete",
            (tuple(config.fortunes0), config.dice_faces, master_seed, start, count,
             config.round_cap, sample_every),
        )
    return (
        "continuous",
        (tuple(config.initial), config.diffusion, config.dt, master_seed, start, count,
         config.max_steps, sample_every),
    )


def _run_chunk(payload) -> dict:
    engine, args = payload
    if engine == "discrete":
        return backend.kernels.run_discrete_chunk(*args)
    return backend.kernels.run_continuous_chunk(*args)


def run_ensemble(
    config: EngineConfig,
    runs: int,
    master_seed: int,
    workers: int = 1,
    sample_every: int = 0,
) -> EnsembleResult:
    """Run `runs` independent trajectories and assemble the result.

    workers=0 uses one process per CPU; workers=1 stays in-process.
    sample_every > 0 keeps decimated trajectories in memory, so use it
    only with modest ensembles.
    """
    if runs < 1:
        raise ValueError("runs must be positive")
    if isinstance(config, DiscreteGameConfig):
        engine = "discrete"
        n = config.n
        initial = np.asarray(config.fortunes0, dtype=np.float64) / config.total
    elif isinstance(config, ContinuousConfig):
        engine = "continuous"
        n = config.n
        initial = np.asarray(config.initial, dtype=np.float64)
    else:
        raise TypeError(f"unsupported engine config {type(config).__name__}")

    starts = list(range(0, runs, CHUNK_SIZE))
    payloads = [
        _chunk_payload(config, master_seed, s, min(CHUNK_SIZE, runs - s), sample_every)
        for s in starts
    ]

    if workers == 0:
        workers = os.cpu_count() or 1
    if workers == 1 or len(payloads) == 1:
        chunk_results = [_run_chunk(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk_results = list(pool.map(_run_chunk, payloads))

    outcomes = np.concatenate([c["outcomes"] for c in chunk_results])
    taus = np.concatenate([c["taus"] for c in chunk_results])
    clocks = None
    if engine == "discrete":
        clocks = np.vstack([c["clocks"] for c in chunk_results])
    inc_count = np.zeros(n, dtype=np.int64)
    inc_sum = np.zeros(n, dtype=np.float64)
    inc_sumsq = np.zeros(n, dtype=np.float64)
    max_drift = 0.0
    samples = [] if sample_every > 0 else None
    for c in chunk_results:  # chunk order == index order: deterministic fold
        inc_count += c["inc_count"]
        inc_sum += c["inc_sum"]
        inc_sumsq += c["inc_sumsq"]
        if c["max_drift"] > max_drift:
            max_drift = c["max_drift"]
        if samples is not None:
            samples.extend(c["samples"])

    return EnsembleResult(
        engine=engine,
        runs=runs,
        initial=initial,
        outcomes=outcomes,
        taus=taus,
        tau_scale=1.0 if engine == "discrete" else config.dt,
        clocks=clocks,
        inc_count=inc_count,
        inc_sum=inc_sum,
        inc_sumsq=inc_sumsq,
        max_trace_drift=max_drift,
        samples=samples,
    )


def compute_stats(result: EnsembleResult) -> EnsembleStats:
    """Summarise an ensemble; all reductions use exact integer sums."""
    runs = result.runs
    n = result.n
    wins = np.bincount(result.outcomes, minlength=n).astype(np.int64)
    freq = wins / runs
    low = np.empty(n)
    high = np.empty(n)
    for i in range(n):
        low[i], high[i] = wilson_interval(int(wins[i]), runs)

    tau_sum = int(result.taus.sum())
    tau_sumsq = int((result.taus.astype(object) ** 2).sum())  # exact, avoids overflow
    tau_mean = (tau_sum / runs) * result.tau_scale
    if runs > 1:
        var_raw = (tau_sumsq - tau_sum * tau_sum / runs) / (runs - 1)
        tau_var = var_raw * result.tau_scale**2
    else:
        tau_var = math.nan

    mart = np.full(n, math.nan)
    for i in range(n):
        if result.inc_count[i] >= 2:
            mart[i] = martingale_z_from_stats(
                int(result.inc_count[i]), float(result.inc_sum[i]), float(result.inc_sumsq[i])
            )

    return EnsembleStats(
        runs=runs,
        wins=wins,
        freq=freq,
        wilson_low=low,
        wilson_high=high,
        tau_mean=tau_mean,
        tau_var=tau_var,
        martingale_z=mart,
        stopped_mean=freq.copy(),
    )
