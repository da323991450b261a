"""Euler integration of the pairwise-exchange simplex SDE with absorption.

Each active pair {k, l} carries an independent Brownian increment; one
integration step transfers a Normal(0, 2*D*dt) amount from l to k (sign
decides direction).  The diffusion is state-independent away from the
boundary, so plain Euler is exact between boundary contacts.  A transfer
that would push a component negative is truncated at exactly the amount
that reaches zero and the component freezes: the underlying Brownian path
is read as having hit the absorbing boundary inside the step.  Transfers
are antisymmetric, so the trace is conserved to rounding.

The per-pair increment convention: the written amplitude is sqrt(2*D), so
the per-pair step variance is 2*D*dt and a discrete game with quantum dq
matches the SDE exactly when D = dq^2 / (2 * round duration).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BudgetExceededError
from .rng import Xoshiro256pp, sub_seed
from .state import DiagonalState, PairIndex, new_state, terminal_outcome

DEFAULT_MAX_STEPS = 10**9
DEFAULT_STEP_WARN_FRACTION = 0.25


@dataclass(frozen=True)
class ContinuousConfig:
    """Initial simplex point, diffusion coefficient, step, and seed."""

    initial: tuple[float, ...]
    diffusion: float
    dt: float
    seed: int = 0
    max_steps: int = DEFAULT_MAX_STEPS
    step_warn_fraction: float = DEFAULT_STEP_WARN_FRACTION

    def __post_init__(self):
        initial = tuple(float(x) for x in self.initial)
        object.__setattr__(self, "initial", initial)
        new_state(initial)  # simplex validation
        if not self.diffusion > 0.0:
            raise ValueError("diffusion must be positive")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        nonzero = [x for x in initial if x > 0.0]
        if len(nonzero) > 1:
            smallest = min(nonzero)
            if self.step_std > self.step_warn_fraction * smallest:
                warnings.warn(
                    f"per-pair step std {self.step_std:.4g} exceeds "
                    f"{self.step_warn_fraction} of the smallest nonzero initial "
                    f"component {smallest:.4g}; boundary absorption will be "
                    f"resolved coarsely",
                    stacklevel=2,
                )

    @property
    def n(self) -> int:
        return len(self.initial)

    @property
    def step_std(self) -> float:
        """Per-pair increment standard deviation, sqrt(2*D*dt)."""
        return math.sqrt(2.0 * self.diffusion * self.dt)


@dataclass
class ContinuousTrajectory:
    """One absorbed SDE path: winner, stopping time, optional samples."""

    outcome: int
    stopping_time: float
    steps: int
    final_values: np.ndarray
    max_trace_drift: float
    samples: Optional[list[tuple[float, list[float]]]] = None
    inc_count: np.ndarray = None
    inc_sum: np.ndarray = None
    inc_sumsq: np.ndarray = None

    def to_json_dict(self) -> dict:
        record = {
            "outcome": int(self.outcome),
            "steps": int(self.steps),
            "stopping_time": float(self.stopping_time),
        }
        if self.samples is not None:
            record["samples"] = [[float(t), [float(v) for v in vs]] for t, vs in self.samples]
        return record


def _seq_sum(values) -> float:
    """Left-to-right float sum, mirroring the compiled kernel's loop."""
    total = 0.0
    for x in values:
        total += float(x)
    return total


def noise_amplitude(state: DiagonalState, i: int, pair: PairIndex, diffusion: float) -> float:
    """Signed noise amplitude of component i against the pair's Brownian term.

    +sqrt(2*D) when i is the pair's first member, -sqrt(2*D) when the
    second, 0 when i is not in the pair or either member is frozen.
    """
    if state.frozen[pair.k] or state.frozen[pair.l]:
        return 0.0
    a = math.sqrt(2.0 * diffusion)
    if i == pair.k:
        return a
    if i == pair.l:
        return -a
    return 0.0


def sde_step(state: DiagonalState, config: ContinuousConfig, rng: Xoshiro256pp) -> DiagonalState:
    """Advance one step of dt, visiting active pairs in lex order.

    Draws are consumed only for pairs active at the moment they are
    visited, matching the compiled kernel's stream consumption exactly.
    """
    if terminal_outcome(state) is not None:
        raise ValueError("cannot step a terminal state")
    v = state.values.copy()
    frozen = state.frozen.copy()
    n = v.shape[0]
    s = config.step_std
    for k in range(n - 1):
        for l in range(k + 1, n):
            if frozen[k] or frozen[l]:
                continue
            x = s * rng.normal()
            if x >= 0.0:
                gain, lose, amt = k, l, x
            else:
                gain, lose, amt = l, k, -x
            if amt >= v[lose]:
                # boundary hit inside the step: truncate and absorb
                amt = v[lose]
                v[gain] += amt
                v[lose] = 0.0
                frozen[lose] = True
            else:
                v[gain] += amt
                v[lose] -= amt
    return DiagonalState(values=v, frozen=frozen, time=state.time + config.dt)


def run_sde(
    config: ContinuousConfig,
    rng: Optional[Xoshiro256pp] = None,
    sample_every: int = 0,
) -> ContinuousTrajectory:
    """Integrate to absorption and return the trajectory record.

    With rng omitted, the stream is the one ensemble trajectory 0 would
    use under master seed config.seed.
    """
    if rng is None:
        rng = Xoshiro256pp(sub_seed(config.seed, 0))
    state = new_state(config.initial)
    n = state.n
    inc_count = np.zeros(n, dtype=np.int64)
    inc_sum = np.zeros(n, dtype=np.float64)
    inc_sumsq = np.zeros(n, dtype=np.float64)
    samples: Optional[list] = [] if sample_every > 0 else None
    if samples is not None:
        samples.append((0.0, state.values.tolist()))
    max_drift = abs(_seq_sum(state.values) - 1.0)
    steps = 0

    while (outcome := terminal_outcome(state)) is None:
        if steps >= config.max_steps:
            raise BudgetExceededError(
                f"no absorption after {steps} steps (cap {config.max_steps})"
            )
        before = state.values
        active_before = ~state.frozen
        state = sde_step(state, config, rng)
        steps += 1
        inc = state.values - before
        inc_count[active_before] += 1
        inc_sum[active_before] += inc[active_before]
        inc_sumsq[active_before] += inc[active_before] ** 2
        drift = abs(_seq_sum(state.values) - 1.0)
        if drift > max_drift:
            max_drift = drift
        if samples is not None and steps % sample_every == 0:
            samples.append((state.time, state.values.tolist()))

    final = np.zeros(n, dtype=np.float64)
    final[outcome] = 1.0  # trace is 1 by construction; drop rounding residue
    return ContinuousTrajectory(
        outcome=outcome,
        stopping_time=steps * config.dt,
        steps=steps,
        final_values=final,
        max_trace_drift=max_drift,
        samples=samples,
        inc_count=inc_count,
        inc_sum=inc_sum,
        inc_sumsq=inc_sumsq,
    )


@dataclass
class ComparisonReport:
    """Side-by-side discrete vs continuous ensembles at matched diffusion."""

    fortunes0: tuple[int, ...]
    born: np.ndarray
    round_dt: float
    diffusion: float
    sde_dt: float
    runs: int
    discrete_stats: "EnsembleStats"
    continuous_stats: "EnsembleStats"
    discrete_tau_time: tuple[float, float]  # mean, standard error (time units)
    continuous_tau_time: tuple[float, float]
    joint_consistent: np.ndarray  # per component, two-proportion z95 check
    born_in_discrete_ci: np.ndarray
    born_in_continuous_ci: np.ndarray


def discrete_continuum_check(
    N0: int,
    fortunes0,
    dt: float,
    runs: int = 20000,
    master_seed: int = 0,
    workers: int = 1,
    sde_substeps: int = 256,
    dice_faces: int = 6,
) -> ComparisonReport:
    """Run matched discrete and continuous ensembles and compare hit laws.

    dt is the duration of one game round; it fixes D = quantum^2 / (2*dt).
    The SDE itself is integrated at dt/sde_substeps so that the first
    passage discretization bias stays well inside the Monte Carlo noise
    (integrating exactly at the game step would bias continuous hits by
    about 0.58 * quantum near each boundary).
    """
    from .analysis import Z95, born_rule_prediction
    from .discrete import DiscreteGameConfig
    from .ensemble import compute_stats, run_ensemble

    if N0 < 2:
        raise ValueError("N0 must be at least 2")
    fortunes = tuple(int(x) for x in fortunes0)
    if sum(fortunes) != N0:
        raise ValueError(f"fortunes {fortunes} do not sum to N0={N0}")
    if runs < 1:
        raise ValueError("runs must be positive")
    if sde_substeps < 1:
        raise ValueError("sde_substeps must be positive")

    quantum = 1.0 / N0
    diffusion = quantum**2 / (2.0 * dt)
    sde_dt = dt / sde_substeps

    seed_d = sub_seed(master_seed, 0)
    seed_c = sub_seed(master_seed, 1)
    d_config = DiscreteGameConfig(fortunes0=fortunes, dice_faces=dice_faces)
    c_config = ContinuousConfig(
        initial=tuple(f * quantum for f in fortunes),
        diffusion=diffusion,
        dt=sde_dt,
    )
    d_result = run_ensemble(d_config, runs=runs, master_seed=seed_d, workers=workers)
    c_result = run_ensemble(c_config, runs=runs, master_seed=seed_c, workers=workers)
    d_stats = compute_stats(d_result)
    c_stats = compute_stats(c_result)

    born = born_rule_prediction(fortunes)
    n = len(fortunes)
    joint = np.zeros(n, dtype=bool)
    in_d = np.zeros(n, dtype=bool)
    in_c = np.zeros(n, dtype=bool)
    for i in range(n):
        pd, pc = d_stats.freq[i], c_stats.freq[i]
        se = math.sqrt(pd * (1.0 - pd) / runs + pc * (1.0 - pc) / runs)
        joint[i] = abs(pd - pc) <= Z95 * se if se > 0 else pd == pc
        in_d[i] = d_stats.wilson_low[i] <= born[i] <= d_stats.wilson_high[i]
        in_c[i] = c_stats.wilson_low[i] <= born[i] <= c_stats.wilson_high[i]

    # stopping times on the shared real-time axis: rounds * dt vs steps * sde_dt
    d_tau = d_result.taus * dt
    c_tau = c_result.taus * sde_dt
    d_tau_stats = (float(d_tau.mean()), float(d_tau.std(ddof=1) / math.sqrt(runs)))
    c_tau_stats = (float(c_tau.mean()), float(c_tau.std(ddof=1) / math.sqrt(runs)))

    return ComparisonReport(
        fortunes0=fortunes,
        born=born,
        round_dt=dt,
        diffusion=diffusion,
        sde_dt=sde_dt,
        runs=runs,
        discrete_stats=d_stats,
        continuous_stats=c_stats,
        discrete_tau_time=d_tau_stats,
        continuous_tau_time=c_tau_stats,
        joint_consistent=joint,
        born_in_discrete_ci=in_d,
        born_in_continuous_ci=in_c,
    )
