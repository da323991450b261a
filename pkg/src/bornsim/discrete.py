"""Dice-duel gambler's-ruin engine over integer fortunes.

One round visits every pair of still-active gamblers in lexicographic
order.  The pair duels (highest die wins, ties rerolled), one unit moves
from loser to winner, and a gambler whose fortune hits zero is frozen on
the spot and skipped for the rest of the game.  Fortunes stay integers
throughout, so the total is conserved exactly and absorption detection is
exact; conversion to probabilities (times 1/N0) happens only at reporting
boundaries.

This module is the readable single-trajectory implementation.  Ensembles
run through bornsim.ensemble, which dispatches to the compiled kernels
when available; both paths consume identical random streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BudgetExceededError
from .rng import Xoshiro256pp, sub_seed

DEFAULT_ROUND_CAP = 10**9


@dataclass(frozen=True)
class DiscreteGameConfig:
    """Initial integer fortunes, die size, and seed for one game."""

    fortunes0: tuple[int, ...]
    dice_faces: int = 6
    seed: int = 0
    round_cap: int = DEFAULT_ROUND_CAP

    def __post_init__(self):
        fortunes = tuple(int(x) for x in self.fortunes0)
        object.__setattr__(self, "fortunes0", fortunes)
        if len(fortunes) < 2:
            raise ValueError("need at least two gamblers")
        if any(x < 0 for x in fortunes):
            raise ValueError("fortunes must be non-negative integers")
        if sum(fortunes) < 1:
            raise ValueError("total fortune must be at least one unit")
        if self.dice_faces < 2:
            raise ValueError("dice need at least two faces")
        if self.round_cap < 1:
            raise ValueError("round_cap must be positive")

    @property
    def n(self) -> int:
        return len(self.fortunes0)

    @property
    def total(self) -> int:
        """N0, the conserved total fortune."""
        return sum(self.fortunes0)

    @property
    def quantum(self) -> float:
        """The money/probability quantum, 1/N0."""
        return 1.0 / self.total


@dataclass
class GameState:
    """Mutable mid-game snapshot: integer fortunes, frozen mask, clocks."""

    fortunes: np.ndarray
    frozen: np.ndarray
    rounds: int = 0
    clocks: np.ndarray = None  # per-gambler count of sub-rounds played

    def __post_init__(self):
        self.fortunes = np.asarray(self.fortunes, dtype=np.int64).copy()
        self.frozen = np.asarray(self.frozen, dtype=bool).copy()
        if self.clocks is None:
            self.clocks = np.zeros(self.fortunes.shape[0], dtype=np.int64)
        else:
            self.clocks = np.asarray(self.clocks, dtype=np.int64).copy()

    @classmethod
    def from_config(cls, config: DiscreteGameConfig) -> "GameState":
        fortunes = np.asarray(config.fortunes0, dtype=np.int64)
        return cls(fortunes=fortunes, frozen=(fortunes == 0))

    @property
    def n(self) -> int:
        return self.fortunes.shape[0]

    def active_count(self) -> int:
        return int(np.count_nonzero(~self.frozen))

    def is_terminal(self) -> bool:
        return self.active_count() == 1

    def outcome(self) -> Optional[int]:
        alive = np.flatnonzero(~self.frozen)
        return int(alive[0]) if alive.shape[0] == 1 else None


@dataclass
class DiscreteTrajectory:
    """One finished game: winner, elapsed rounds, per-gambler clocks.

    inc_count / inc_sum / inc_sumsq hold the pooled per-gambler sufficient
    statistics of the signed fortune changes over sub-rounds the gambler
    actually played, for martingale testing.
    """

    outcome: int
    rounds: int
    subrounds_per_gambler: np.ndarray
    samples: Optional[list[tuple[int, list[int]]]] = None
    inc_count: np.ndarray = None
    inc_sum: np.ndarray = None
    inc_sumsq: np.ndarray = None

    @property
    def n(self) -> int:
        return self.subrounds_per_gambler.shape[0]

    def to_json_dict(self) -> dict:
        record = {
            "outcome": int(self.outcome),
            "rounds": int(self.rounds),
            "clocks": [int(c) for c in self.subrounds_per_gambler],
        }
        if self.samples is not None:
            record["samples"] = [[int(r), [int(f) for f in fs]] for r, fs in self.samples]
        return record


def dice_duel(rng: Xoshiro256pp, dice_faces: int = 6) -> int:
    """Play one duel: both sides roll, higher value wins, ties reroll.

    Returns 0 if the first side wins, 1 if the second does.  Rerolling
    ties keeps each side's win probability exactly one half.
    """
    if dice_faces < 2:
        raise ValueError("dice need at least two faces")
    while True:
        a = rng.roll(dice_faces)
        b = rng.roll(dice_faces)
        if a > b:
            return 0
        if b > a:
            return 1


def play_round(state: GameState, rng: Xoshiro256pp, dice_faces: int = 6) -> GameState:
    """Run one full round (all active pairs in lex order) on a copy of state.

    A gambler ruined mid-round is frozen immediately and skipped in the
    remaining sub-rounds of this round.  Raises ValueError on a terminal
    state.
    """
    if state.is_terminal():
        raise ValueError("cannot play a round from a terminal state")
    out = GameState(
        fortunes=state.fortunes,
        frozen=state.frozen,
        rounds=state.rounds + 1,
        clocks=state.clocks,
    )
    n = out.n
    f = out.fortunes
    frozen = out.frozen
    total = int(f.sum())
    for k in range(n - 1):
        for l in range(k + 1, n):
            if frozen[k] or frozen[l]:
                continue
            second_won = dice_duel(rng, dice_faces)
            winner, loser = (l, k) if second_won else (k, l)
            f[winner] += 1
            f[loser] -= 1
            out.clocks[k] += 1
            out.clocks[l] += 1
            if f[loser] == 0:
                frozen[loser] = True
            if int(f.sum()) != total:
                raise RuntimeError("trace conservation violated in sub-round")
    return out


def run_game(
    config: DiscreteGameConfig,
    rng: Optional[Xoshiro256pp] = None,
    sample_every: int = 0,
) -> DiscreteTrajectory:
    """Play a game to absorption and return its trajectory record.

    With rng omitted, the stream is the one ensemble trajectory 0 would
    use under master seed config.seed.  sample_every > 0 additionally
    records the fortunes after every that-many rounds (round 0 included).
    """
    if rng is None:
        rng = Xoshiro256pp(sub_seed(config.seed, 0))
    state = GameState.from_config(config)
    n = state.n
    inc_count = np.zeros(n, dtype=np.int64)
    inc_sum = np.zeros(n, dtype=np.float64)
    inc_sumsq = np.zeros(n, dtype=np.float64)
    samples: Optional[list] = [] if sample_every > 0 else None
    if samples is not None:
        samples.append((0, state.fortunes.tolist()))

    while not state.is_terminal():
        if state.rounds >= config.round_cap:
            raise BudgetExceededError(
                f"no absorption after {state.rounds} rounds (cap {config.round_cap})"
            )
        prev_fortunes = state.fortunes.copy()
        prev_clocks = state.clocks.copy()
        state = play_round(state, rng, config.dice_faces)
        played = state.clocks - prev_clocks
        inc_count += played
        inc_sumsq += played  # every played sub-round is a +-1 step
        inc_sum += state.fortunes - prev_fortunes
        if samples is not None and state.rounds % sample_every == 0:
            samples.append((state.rounds, state.fortunes.tolist()))

    return DiscreteTrajectory(
        outcome=state.outcome(),
        rounds=state.rounds,
        subrounds_per_gambler=state.clocks,
        samples=samples,
        inc_count=inc_count,
        inc_sum=inc_sum,
        inc_sumsq=inc_sumsq,
    )
