"""Martingale gambler's-ruin engines on the probability simplex.

Two process engines evolve the diagonal weights of a state between
absorbing boundaries: a dice game over integer fortunes and an Euler
SDE with pairwise antisymmetric noise.  Exact absorbing-chain oracles
and ensemble hypothesis tests verify that hitting frequencies reproduce
the initial weights.
"""

__version__ = "0.1.0"

from .analysis import (
    EnsembleStats,
    ExactSolution,
    OptionalStoppingReport,
    batch_mean_se,
    born_rule_prediction,
    exact_absorption_solve,
    expected_ruin_time_two_player,
    martingale_test,
    optional_stopping_check,
    wilson_interval,
)
from .backend import BACKEND, using_compiled
from .continuous import (
    ComparisonReport,
    ContinuousConfig,
    ContinuousTrajectory,
    discrete_continuum_check,
    noise_amplitude,
    run_sde,
    sde_step,
)
from .discrete import (
    DiscreteGameConfig,
    DiscreteTrajectory,
    GameState,
    dice_duel,
    play_round,
    run_game,
)
from .ensemble import EnsembleResult, compute_stats, run_ensemble
from .errors import (
    BudgetExceededError,
    InsufficientDataError,
    SolverNotConvergedError,
    StateSpaceTooLargeError,
)
from .langevin import (
    LangevinConfig,
    LangevinTrajectory,
    langevin_step,
    momentum_autocorrelation,
    run_langevin,
)
from .rng import Xoshiro256pp, mix64, sub_seed
from .state import DiagonalState, PairIndex, active_pairs, new_state, terminal_outcome
