"""Deterministic random streams: splitmix64 seeding, xoshiro256++ draws.

Every trajectory in an ensemble owns an independent generator seeded with
``sub_seed(master_seed, trajectory_index)``, so results do not depend on
worker count or scheduling.  The seeding rule is published so other
implementations can reproduce the streams exactly:

* ``sub_seed(m, i)`` is the ``(i + 1)``-th output of a splitmix64 sequence
  started at state ``m`` (Steele/Lea/Flood constants).
* The per-trajectory generator is xoshiro256++ (Blackman/Vigna), its four
  state words taken from a splitmix64 sequence started at the sub-seed.
* Uniform doubles are ``(u64 >> 11) * 2^-53``; dice rolls use unbiased
  rejection sampling; normals use the Marsaglia polar method with the
  spare value cached.

The compiled kernel module implements the same arithmetic in C; the two
backends produce bit-identical streams, which the test suite checks.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

RNG_FAMILY = "xoshiro256++"
RNG_VERSION = "1.0"
SEED_MIX = "splitmix64"

_U53 = 2.0**-53


def mix64(z: int) -> int:
    """splitmix64 output function (finalizer) on a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def sub_seed(master_seed: int, index: int) -> int:
    """Per-trajectory seed for trajectory ``index`` under ``master_seed``."""
    return mix64((master_seed + (index + 1) * GOLDEN) & MASK64)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256pp:
    """xoshiro256++ with the draw helpers the engines need.

    Instances are cheap; make one per trajectory and never share across
    trajectories, or reproducibility across worker counts is lost.
    """

    __slots__ = ("s0", "s1", "s2", "s3", "_spare", "_has_spare")

    def __init__(self, seed: int):
        st = seed & MASK64
        st = (st + GOLDEN) & MASK64
        self.s0 = mix64(st)
        st = (st + GOLDEN) & MASK64
        self.s1 = mix64(st)
        st = (st + GOLDEN) & MASK64
        self.s2 = mix64(st)
        st = (st + GOLDEN) & MASK64
        self.s3 = mix64(st)
        self._spare = 0.0
        self._has_spare = False

    @classmethod
    def for_trajectory(cls, master_seed: int, index: int) -> "Xoshiro256pp":
        return cls(sub_seed(master_seed, index))

    def u64(self) -> int:
        result = (_rotl((self.s0 + self.s3) & MASK64, 23) + self.s0) & MASK64
        t = (self.s1 << 17) & MASK64
        self.s2 ^= self.s0
        self.s3 ^= self.s1
        self.s1 ^= self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        self.s3 = _rotl(self.s3, 45)
        return result

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.u64() >> 11) * _U53

    def roll(self, faces: int) -> int:
        """Unbiased die roll in {1, ..., faces} by rejection sampling."""
        rem = (1 << 64) % faces
        u = self.u64()
        if rem:
            limit = (1 << 64) - rem
            while u >= limit:
                u = self.u64()
        return 1 + (u % faces)

    def normal(self) -> float:
        """Standard normal via the polar method, spare value cached."""
        if self._has_spare:
            self._has_spare = False
            return self._spare
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        f = math.sqrt(-2.0 * math.log(s) / s)
        self._spare = v * f
        self._has_spare = True
        return u * f
