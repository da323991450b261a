"""Classical underdamped Langevin reference integrator.

The non-quantum analogue of noise-plus-average dynamics: momentum relaxes
with friction while receiving Gaussian kicks, position streams with p/M.
Explicit Euler per step,

    p' = p - friction * p * dt + sqrt(2 * diffusion_p * dt) * g,
    r' = r + (p / M) * dt,

valid for friction * dt well below one.  Stationary momentum variance is
diffusion_p / friction and the momentum autocorrelation decays as
exp(-friction * lag); both are used as simulator health checks.

This module is validation plumbing, so it uses numpy's default_rng rather
than the engines' portable generator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError

FRICTION_DT_WARN = 0.1


@dataclass(frozen=True)
class LangevinConfig:
    mass: float
    friction: float
    diffusion_p: float
    dt: float
    steps: int
    seed: int = 0
    r0: float = 0.0
    p0: float = 0.0

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError("mass must be positive")
        if not self.friction > 0.0:
            raise ValueError("friction must be positive")
        if self.diffusion_p < 0.0:
            raise ValueError("diffusion_p must be non-negative")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.steps < 1:
            raise ValueError("steps must be positive")
        if self.friction * self.dt > FRICTION_DT_WARN:
            warnings.warn(
                f"friction*dt = {self.friction * self.dt:.3g} is coarse; "
                "the explicit Euler update is only accurate for values well below one",
                stacklevel=2,
            )


@dataclass
class LangevinTrajectory:
    t: np.ndarray
    r: np.ndarray
    p: np.ndarray
    dt: float

    def __len__(self) -> int:
        return self.t.shape[0]


def langevin_step(r: float, p: float, config: LangevinConfig, rng: np.random.Generator):
    """One Euler update; returns (r', p')."""
    g = rng.standard_normal()
    r_new = r + (p / config.mass) * config.dt
    p_new = p - config.friction * p * config.dt + math.sqrt(
        2.0 * config.diffusion_p * config.dt
    ) * g
    return r_new, p_new


def run_langevin(config: LangevinConfig) -> LangevinTrajectory:
    """Integrate config.steps updates; index 0 holds the initial condition."""
    rng = np.random.default_rng(config.seed)
    g = rng.standard_normal(config.steps)
    b = math.sqrt(2.0 * config.diffusion_p * config.dt)
    steps = config.steps
    r = np.empty(steps + 1)
    p = np.empty(steps + 1)
    r[0] = config.r0
    p[0] = config.p0
    rc, pc = config.r0, config.p0
    for k in range(steps):
        # same expressions as langevin_step, so the two paths agree bitwise
        rc = rc + (pc / config.mass) * config.dt
        pc = pc - config.friction * pc * config.dt + b * g[k]
        r[k + 1] = rc
        p[k + 1] = pc
    t = np.arange(steps + 1) * config.dt
    return LangevinTrajectory(t=t, r=r, p=p, dt=config.dt)


def momentum_autocorrelation(trajectory: LangevinTrajectory, lag: float) -> float:
    """Normalized momentum autocorrelation at a time lag.

    The lag is rounded to whole steps.  Expect exp(-friction * lag) in the
    stationary regime; pass a trajectory segment with the transient
    removed.
    """
    k = round(lag / trajectory.dt)
    p = trajectory.p
    m = p.shape[0]
    if k < 0:
        raise ValueError("lag must be non-negative")
    if m - k < 100:
        raise InsufficientDataError(
            f"only {max(m - k, 0)} overlapping samples at lag {lag}; need 100"
        )
    mean = p.mean()
    dev = p - mean
    denom = float(np.dot(dev, dev))
    if denom == 0.0:
        raise InsufficientDataError("momentum series is constant")
    if k == 0:
        return 1.0
    num = float(np.dot(dev[:-k], dev[k:]))
    return num / denom
