"""Exact absorbing-chain oracles and ensemble hypothesis tests.

The oracle builds the literal Markov chain of the dice game, including the
position inside the round's pair schedule (mid-round freezing makes the
round non-exchangeable in principle), and solves the absorption system
directly.  A reduced random-scan variant (uniformly random active pair per
sub-round) is available as a cross-check; the win law agrees between the
two, confirming the hitting probabilities do not depend on scheduling.

Statistical verifiers operate on trajectory ensembles: pooled increment
z-scores for the fair-game (martingale) property, and stopped-value means
for the hitting law.  Pass thresholds of four standard errors keep false
alarms negligible across a test suite while still catching percent-level
bias at the prescribed ensemble sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .discrete import DiscreteGameConfig
from .errors import InsufficientDataError, SolverNotConvergedError, StateSpaceTooLargeError

Z95 = 1.959963984540054  # two-sided 95% normal quantile
SOLVER_TOL = 1e-12
DEFAULT_MAX_STATES = 10**6


def wilson_interval(wins: int, runs: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Chosen over the Wald interval for correct coverage near 0 and 1,
    where hitting probabilities often sit.
    """
    if runs <= 0:
        raise ValueError("runs must be positive")
    if not 0 <= wins <= runs:
        raise ValueError("wins must lie in [0, runs]")
    phat = wins / runs
    z2n = z * z / runs
    center = (phat + z2n / 2.0) / (1.0 + z2n)
    half = (z / (1.0 + z2n)) * math.sqrt(phat * (1.0 - phat) / runs + z2n / (4.0 * runs))
    return (center - half, center + half)


def born_rule_prediction(fortunes0) -> np.ndarray:
    """Predicted win probabilities: each gambler's share of the total."""
    arr = np.asarray(fortunes0)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ValueError("fortunes must be a non-empty vector")
    if np.any(arr < 0):
        raise ValueError("fortunes must be non-negative")
    total = int(arr.sum())
    if total < 1:
        raise ValueError("at least one fortune must be positive")
    return arr.astype(np.float64) / total


@dataclass(frozen=True)
class ExactSolution:
    """Absorption probabilities and expected rounds from the exact chain."""

    absorption_prob: np.ndarray
    expected_rounds: float
    num_states: int

    def to_json_dict(self) -> dict:
        return {
            "absorption_prob": [float(p) for p in self.absorption_prob],
            "expected_rounds": float(self.expected_rounds),
            "num_states": int(self.num_states),
        }


def _winner(fortunes: tuple[int, ...]) -> Optional[int]:
    alive = [i for i, f in enumerate(fortunes) if f > 0]
    return alive[0] if len(alive) == 1 else None


def _scheduled_transitions(fortunes, pos, pairs):
    """Next duel from (fortunes, schedule position): (wrapped, pair, branches).

    Scans the fixed lexicographic schedule from pos for the first pair with
    both members solvent, wrapping to a new round at the end of the
    schedule.  Non-terminal states always contain a playable pair.
    """
    num_pairs = len(pairs)
    p = pos
    wrapped = False
    while True:
        if p >= num_pairs:
            p = 0
            wrapped = True
        k, l = pairs[p]
        if fortunes[k] > 0 and fortunes[l] > 0:
            break
        p += 1
        if wrapped and p >= num_pairs:
            raise RuntimeError("no playable pair in a non-terminal state")
    branches = []
    for winner, loser in ((k, l), (l, k)):
        nxt = list(fortunes)
        nxt[winner] += 1
        nxt[loser] -= 1
        branches.append((tuple(nxt), p + 1))
    return wrapped, branches


def _uniform_transitions(fortunes):
    """Random-scan branches from fortunes: all active pairs equally likely."""
    alive = [i for i, f in enumerate(fortunes) if f > 0]
    branches = []
    pair_list = list(combinations(alive, 2))
    weight = 1.0 / (2.0 * len(pair_list))
    for k, l in pair_list:
        for winner, loser in ((k, l), (l, k)):
            nxt = list(fortunes)
            nxt[winner] += 1
            nxt[loser] -= 1
            branches.append((weight, tuple(nxt)))
    return branches


def exact_absorption_solve(
    config: DiscreteGameConfig,
    max_states: int = DEFAULT_MAX_STATES,
    schedule: str = "round",
) -> ExactSolution:
    """Solve the game's absorbing chain exactly.

    schedule="round" walks the faithful chain over (fortunes, position in
    the round's pair schedule); expected_rounds counts rounds the way the
    engine does (the terminating partial round counts).  schedule="uniform"
    solves the reduced random-scan chain; its expected_rounds field then
    counts played sub-rounds instead.

    Raises StateSpaceTooLargeError past max_states and
    SolverNotConvergedError if the residual exceeds 1e-12.
    """
    if schedule not in ("round", "uniform"):
        raise ValueError(f"unknown schedule {schedule!r}")
    fortunes0 = tuple(config.fortunes0)
    n = len(fortunes0)
    win0 = _winner(fortunes0)
    if win0 is not None:
        probs = np.zeros(n)
        probs[win0] = 1.0
        return ExactSolution(absorption_prob=probs, expected_rounds=0.0, num_states=1)

    pairs = list(combinations(range(n), 2))
    start = (fortunes0, 0) if schedule == "round" else fortunes0

    index: dict = {start: 0}
    order = [start]
    rows, cols, vals = [], [], []
    absorb_rows: dict[int, dict[int, float]] = {}
    reward = []  # expected immediate round (or sub-round) count per state
    frontier = [start]
    while frontier:
        state = frontier.pop()
        sidx = index[state]
        if schedule == "round":
            fortunes, pos = state
            wrapped, branches = _scheduled_transitions(fortunes, pos, pairs)
            weighted = [(0.5, b) for b in branches]
            step_reward = 1.0 if wrapped else 0.0
        else:
            fortunes = state
            weighted = [(w, (nxt, None)) for w, nxt in _uniform_transitions(fortunes)]
            step_reward = 1.0
        while len(reward) <= sidx:
            reward.append(0.0)
        reward[sidx] = step_reward
        for weight, (nxt_fortunes, nxt_pos) in weighted:
            win = _winner(nxt_fortunes)
            if win is not None:
                absorb_rows.setdefault(sidx, {})
                absorb_rows[sidx][win] = absorb_rows[sidx].get(win, 0.0) + weight
                continue
            nxt_state = (nxt_fortunes, nxt_pos) if schedule == "round" else nxt_fortunes
            if nxt_state not in index:
                if len(index) >= max_states:
                    raise StateSpaceTooLargeError(
                        f"more than {max_states} transient states for {fortunes0}"
                    )
                index[nxt_state] = len(order)
                order.append(nxt_state)
                frontier.append(nxt_state)
            rows.append(sidx)
            cols.append(index[nxt_state])
            vals.append(weight)

    m = len(order)
    Q = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(m, m))
    B = np.zeros((m, n))
    for sidx, wins in absorb_rows.items():
        for w, p in wins.items():
            B[sidx, w] = p
    A = scipy.sparse.identity(m, format="csr") - Q
    lu = scipy.sparse.linalg.splu(A.tocsc())
    H = lu.solve(B)
    r = np.asarray(reward)
    counts = lu.solve(r)

    residual = np.abs(A @ H - B).max()
    residual = max(residual, np.abs(A @ counts - r).max())
    if residual > SOLVER_TOL:
        raise SolverNotConvergedError(f"absorption solve residual {residual:.3e}")

    probs = H[0].copy()
    if schedule == "round":
        expected = 1.0 + counts[0]  # the opening round plus later wraps
    else:
        expected = counts[0]
    return ExactSolution(absorption_prob=probs, expected_rounds=float(expected), num_states=m)


def expected_ruin_time_two_player(Ni: int, N0: int) -> float:
    """Expected duels to absorption for a two-gambler game started at Ni.

    Computed by solving the tridiagonal first-step system t(0)=t(N0)=0,
    t(k) = 1 + (t(k-1) + t(k+1))/2, not from a closed form.
    """
    if N0 < 1:
        raise ValueError("N0 must be positive")
    if not 0 <= Ni <= N0:
        raise ValueError("Ni must lie in [0, N0]")
    if Ni in (0, N0):
        return 0.0
    m = N0 - 1
    main = np.full(m, 1.0)
    off = np.full(m - 1, -0.5)
    A = np.diag(main) + np.diag(off, 1) + np.diag(off, -1)
    t = np.linalg.solve(A, np.ones(m))
    return float(t[Ni - 1])


def martingale_z_from_stats(count: int, total: float, sumsq: float) -> float:
    """z-score of the mean increment from pooled sufficient statistics."""
    if count < 2:
        raise InsufficientDataError("need at least two increments")
    mean = total / count
    var = (sumsq - total * total / count) / (count - 1)
    if var <= 0.0:
        return 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
    return mean / math.sqrt(var / count)


MIN_MARTINGALE_INCREMENTS = 1000


def martingale_test(trajectories: Iterable, component: int) -> float:
    """Pooled z-score of a component's active-step increments.

    Pools the increment statistics carried by each trajectory; requires at
    least 1000 recorded increments while the component was active.  |z| at
    or below 4 passes.
    """
    count = 0
    total = 0.0
    sumsq = 0.0
    for traj in trajectories:
        count += int(traj.inc_count[component])
        total += float(traj.inc_sum[component])
        sumsq += float(traj.inc_sumsq[component])
    if count < MIN_MARTINGALE_INCREMENTS:
        raise InsufficientDataError(
            f"component {component} has {count} recorded increments, "
            f"need {MIN_MARTINGALE_INCREMENTS}"
        )
    return martingale_z_from_stats(count, total, sumsq)


@dataclass(frozen=True)
class OptionalStoppingReport:
    """Stopped means vs initial values, in binomial standard-error units."""

    runs: int
    initial: np.ndarray
    stopped_mean: np.ndarray
    diff: np.ndarray
    se: np.ndarray
    z: np.ndarray

    def max_abs_z(self) -> float:
        return float(np.nanmax(np.abs(self.z)))


def optional_stopping_check(trajectories: Sequence, initial) -> OptionalStoppingReport:
    """Compare per-component stopped means (win frequencies) to initial values.

    All trajectories must be terminal (they carry an outcome).  The
    standard error is binomial at the initial value, so components starting
    at 0 or 1 must match exactly.
    """
    initial = np.asarray(initial, dtype=np.float64)
    n = initial.shape[0]
    runs = len(trajectories)
    if runs == 0:
        raise InsufficientDataError("no trajectories")
    wins = np.zeros(n, dtype=np.int64)
    for traj in trajectories:
        if traj.outcome is None:
            raise ValueError("non-terminal trajectory present")
        wins[traj.outcome] += 1
    stopped = wins / runs
    diff = stopped - initial
    se = np.sqrt(initial * (1.0 - initial) / runs)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / se, np.where(diff == 0, 0.0, np.inf))
    return OptionalStoppingReport(
        runs=runs, initial=initial, stopped_mean=stopped, diff=diff, se=se, z=z
    )


@dataclass(frozen=True)
class EnsembleStats:
    """Summary of one ensemble: hit counts, intervals, clocks, test scores."""

    runs: int
    wins: np.ndarray
    freq: np.ndarray
    wilson_low: np.ndarray
    wilson_high: np.ndarray
    tau_mean: float
    tau_var: float
    martingale_z: np.ndarray  # NaN where a component recorded no increments
    stopped_mean: np.ndarray

    def to_json_dict(self) -> dict:
        def _clean(x):
            v = float(x)
            return v if math.isfinite(v) else None

        return {
            "runs": int(self.runs),
            "wins": [int(w) for w in self.wins],
            "freq": [float(f) for f in self.freq],
            "wilson_low": [float(x) for x in self.wilson_low],
            "wilson_high": [float(x) for x in self.wilson_high],
            "tau_mean": _clean(self.tau_mean),
            "tau_var": _clean(self.tau_var),
            "martingale_z": [_clean(z) for z in self.martingale_z],
            "stopped_mean": [float(x) for x in self.stopped_mean],
        }


def batch_mean_se(x, n_blocks: int = 64) -> tuple[float, float]:
    """Mean and batch-means standard error for a correlated series.

    Blocks must be much longer than the correlation time for the SE to be
    trustworthy; callers pick n_blocks accordingly.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] < 2 * n_blocks:
        raise InsufficientDataError(f"need at least {2 * n_blocks} samples")
    usable = (x.shape[0] // n_blocks) * n_blocks
    blocks = x[:usable].reshape(n_blocks, -1).mean(axis=1)
    mean = float(blocks.mean())
    se = float(blocks.std(ddof=1) / math.sqrt(n_blocks))
    return mean, se
