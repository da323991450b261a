"""Diagonal state on the probability simplex with absorption bookkeeping.

A state is the vector of diagonal weights plus a frozen mask marking
components absorbed at zero.  Both engines share the same rules: weights
stay in [0, 1] and sum to one, a component at zero is frozen forever, and
the process is terminal exactly when a single unfrozen component remains
(holding all the weight).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Optional

import numpy as np

SIMPLEX_ATOL = 1e-12


class PairIndex(NamedTuple):
    """Unordered component pair {k, l} stored with k < l (0-based)."""

    k: int
    l: int


@dataclass(frozen=True)
class DiagonalState:
    values: np.ndarray
    frozen: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).copy()
        frozen = np.asarray(self.frozen, dtype=bool).copy()
        values.setflags(write=False)
        frozen.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "frozen", frozen)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "frozen": [bool(b) for b in self.frozen],
            "time": float(self.time),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiagonalState":
        return cls(
            values=np.asarray(data["values"], dtype=np.float64),
            frozen=np.asarray(data["frozen"], dtype=bool),
            time=float(data["time"]),
        )


def new_state(values) -> DiagonalState:
    """Validate a probability vector and wrap it as a fresh state at time 0.

    Components that start at exactly zero are already absorbed and come out
    frozen.  Rejects negative entries, fewer than two components, and sums
    off unity by more than SIMPLEX_ATOL.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("values must be a one-dimensional vector")
    if arr.shape[0] < 2:
        raise ValueError("need at least two components")
    if np.any(arr < 0.0):
        raise ValueError("negative entries are not probabilities")
    if np.any(arr > 1.0):
        raise ValueError("entries above one are not probabilities")
    total = math.fsum(arr.tolist())
    if abs(total - 1.0) > SIMPLEX_ATOL:
        raise ValueError(f"entries sum to {total!r}, not 1 within {SIMPLEX_ATOL}")
    return DiagonalState(values=arr, frozen=(arr == 0.0), time=0.0)


def active_pairs(state: DiagonalState) -> list[PairIndex]:
    """All pairs {k, l}, k < l, with both members unfrozen, in lex order."""
    alive = np.flatnonzero(~state.frozen)
    return [PairIndex(int(k), int(l)) for k, l in combinations(alive, 2)]


def terminal_outcome(state: DiagonalState) -> Optional[int]:
    """The surviving component's index if exactly one remains, else None."""
    alive = np.flatnonzero(~state.frozen)
    if alive.shape[0] == 1:
        return int(alive[0])
    return None
