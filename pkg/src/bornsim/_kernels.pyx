# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory kernels (hot inner loops).

Bit-for-bit equivalent to bornsim._pykernels: same splitmix64 seeding,
same xoshiro256++ stream, same polar-method normals, same accumulation
grouping.  The equivalence is enforced by tests/test_backends.py.
"""

import numpy as np

from libc.math cimport fabs, log, sqrt
from libc.stdint cimport int64_t, uint64_t

from .errors import BudgetExceededError

BACKEND_NAME = "compiled"

cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline uint64_t _sub_seed(uint64_t master, uint64_t index) noexcept nogil:
    return _mix64(master + (index + 1) * GOLDEN)


cdef struct Rng:
    uint64_t s0
    uint64_t s1
    uint64_t s2
    uint64_t s3
    double spare
    int has_spare


cdef inline void _rng_seed(Rng* r, uint64_t seed) noexcept nogil:
    cdef uint64_t st = seed
    st += GOLDEN
    r.s0 = _mix64(st)
    st += GOLDEN
    r.s1 = _mix64(st)
    st += GOLDEN
    r.s2 = _mix64(st)
    st += GOLDEN
    r.s3 = _mix64(st)
    r.spare = 0.0
    r.has_spare = 0


cdef inline uint64_t _rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _next(Rng* r) noexcept nogil:
    cdef uint64_t result = _rotl(r.s0 + r.s3, 23) + r.s0
    cdef uint64_t t = r.s1 << 17
    r.s2 ^= r.s0
    r.s3 ^= r.s1
    r.s1 ^= r.s2
    r.s0 ^= r.s3
    r.s2 ^= t
    r.s3 = _rotl(r.s3, 45)
    return result


cdef inline double _uniform(Rng* r) noexcept nogil:
    return <double>(_next(r) >> 11) * (1.0 / 9007199254740992.0)


cdef inline int64_t _roll(Rng* r, uint64_t faces) noexcept nogil:
    cdef uint64_t rem = (<uint64_t>0 - faces) % faces
    cdef uint64_t limit
    cdef uint64_t u = _next(r)
    if rem > 0:
        limit = <uint64_t>0 - rem
        while u >= limit:
            u = _next(r)
    return <int64_t>(1 + u % faces)


cdef inline int _duel(Rng* r, uint64_t faces) noexcept nogil:
    # 0 if the first side wins, 1 for the second; ties reroll
    cdef int64_t a, b
    while True:
        a = _roll(r, faces)
        b = _roll(r, faces)
        if a > b:
            return 0
        if b > a:
            return 1


cdef inline double _normal(Rng* r) noexcept nogil:
    cdef double u, v, s, f
    if r.has_spare:
        r.has_spare = 0
        return r.spare
    while True:
        u = 2.0 * _uniform(r) - 1.0
        v = 2.0 * _uniform(r) - 1.0
        s = u * u + v * v
        if s < 1.0 and s > 0.0:
            break
    f = sqrt(-2.0 * log(s) / s)
    r.spare = v * f
    r.has_spare = 1
    return u * f


def run_discrete_chunk(
    fortunes0,
    int dice_faces,
    master_seed,
    start_index,
    int count,
    round_cap,
    int sample_every,
):
    f0 = np.ascontiguousarray(np.asarray(fortunes0, dtype=np.int64))
    cdef int64_t[::1] f0v = f0
    cdef int n = f0v.shape[0]
    cdef int64_t total0 = 0
    cdef int i
    for i in range(n):
        total0 += f0v[i]

    outcomes = np.empty(count, dtype=np.int64)
    taus = np.empty(count, dtype=np.int64)
    clocks = np.zeros((count, n), dtype=np.int64)
    inc_count = np.zeros(n, dtype=np.int64)
    inc_sum = np.zeros(n, dtype=np.float64)
    inc_sumsq = np.zeros(n, dtype=np.float64)
    cdef int64_t[::1] out_v = outcomes
    cdef int64_t[::1] tau_v = taus
    cdef int64_t[:, ::1] clk_v = clocks
    cdef int64_t[::1] icnt_v = inc_count
    cdef double[::1] isum_v = inc_sum
    cdef double[::1] issq_v = inc_sumsq

    f_buf = np.empty(n, dtype=np.int64)
    frozen_buf = np.empty(n, dtype=np.int64)
    tcnt_buf = np.empty(n, dtype=np.int64)
    tsum_buf = np.empty(n, dtype=np.float64)
    tssq_buf = np.empty(n, dtype=np.float64)
    cdef int64_t[::1] f = f_buf
    cdef int64_t[::1] frozen = frozen_buf
    cdef int64_t[::1] tcnt = tcnt_buf
    cdef double[::1] tsum = tsum_buf
    cdef double[::1] tssq = tssq_buf

    cdef uint64_t mseed = <uint64_t>(int(master_seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t start = <uint64_t>(int(start_index))
    cdef int64_t cap = <int64_t>(int(round_cap))
    cdef uint64_t faces = <uint64_t>dice_faces

    samples = [] if sample_every > 0 else None

    cdef Rng rng
    cdef int t, k, l, active, winner, loser, second_won
    cdef int64_t rounds, check
    for t in range(count):
        _rng_seed(&rng, _sub_seed(mseed, start + <uint64_t>t))
        active = 0
        for i in range(n):
            f[i] = f0v[i]
            frozen[i] = 1 if f0v[i] == 0 else 0
            if not frozen[i]:
                active += 1
            tcnt[i] = 0
            tsum[i] = 0.0
            tssq[i] = 0.0
            clk_v[t, i] = 0
        traj_samples = [(0, [f[i] for i in range(n)])] if sample_every > 0 else None
        rounds = 0

        while active > 1:
            if rounds >= cap:
                raise BudgetExceededError(
                    f"no absorption after {rounds} rounds (cap {cap})"
                )
            rounds += 1
            for k in range(n - 1):
                for l in range(k + 1, n):
                    if frozen[k] or frozen[l]:
                        continue
                    second_won = _duel(&rng, faces)
                    if second_won:
                        winner = l
                        loser = k
                    else:
                        winner = k
                        loser = l
                    f[winner] += 1
                    f[loser] -= 1
                    clk_v[t, k] += 1
                    clk_v[t, l] += 1
                    tcnt[k] += 1
                    tcnt[l] += 1
                    tssq[k] += 1.0
                    tssq[l] += 1.0
                    tsum[winner] += 1.0
                    tsum[loser] -= 1.0
                    if f[loser] == 0:
                        frozen[loser] = 1
                        active -= 1
                    check = 0
                    for i in range(n):
                        check += f[i]
                    if check != total0:
                        raise RuntimeError("trace conservation violated in sub-round")
            if sample_every > 0 and rounds % sample_every == 0:
                traj_samples.append((int(rounds), [f[i] for i in range(n)]))

        for i in range(n):
            if not frozen[i]:
                out_v[t] = i
                break
        tau_v[t] = rounds
        for i in range(n):
            icnt_v[i] += tcnt[i]
            isum_v[i] += tsum[i]
            issq_v[i] += tssq[i]
        if sample_every > 0:
            samples.append(traj_samples)

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
    double diffusion,
    double dt,
    master_seed,
    start_index,
    int count,
    max_steps,
    int sample_every,
):
    v0 = np.ascontiguousarray(np.asarray(initial, dtype=np.float64))
    cdef double[::1] v0v = v0
    cdef int n = v0v.shape[0]
    cdef double s = sqrt(2.0 * diffusion * dt)

    outcomes = np.empty(count, dtype=np.int64)
    taus = np.empty(count, dtype=np.int64)
    inc_count = np.zeros(n, dtype=np.int64)
    inc_sum = np.zeros(n, dtype=np.float64)
    inc_sumsq = np.zeros(n, dtype=np.float64)
    cdef int64_t[::1] out_v = outcomes
    cdef int64_t[::1] tau_v = taus
    cdef int64_t[::1] icnt_v = inc_count
    cdef double[::1] isum_v = inc_sum
    cdef double[::1] issq_v = inc_sumsq

    v_buf = np.empty(n, dtype=np.float64)
    vstart_buf = np.empty(n, dtype=np.float64)
    frozen_buf = np.empty(n, dtype=np.int64)
    active_start_buf = np.empty(n, dtype=np.int64)
    tcnt_buf = np.empty(n, dtype=np.int64)
    tsum_buf = np.empty(n, dtype=np.float64)
    tssq_buf = np.empty(n, dtype=np.float64)
    cdef double[::1] v = v_buf
    cdef double[::1] vstart = vstart_buf
    cdef int64_t[::1] frozen = frozen_buf
    cdef int64_t[::1] active_start = active_start_buf
    cdef int64_t[::1] tcnt = tcnt_buf
    cdef double[::1] tsum = tsum_buf
    cdef double[::1] tssq = tssq_buf

    cdef uint64_t mseed = <uint64_t>(int(master_seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t start = <uint64_t>(int(start_index))
    cdef int64_t cap = <int64_t>(int(max_steps))

    samples = [] if sample_every > 0 else None

    cdef Rng rng
    cdef int t, i, k, l, active, gain, lose
    cdef int64_t steps
    cdef double x, amt, total, drift, max_drift, chunk_max_drift, inc, time
    chunk_max_drift = 0.0
    for t in range(count):
        _rng_seed(&rng, _sub_seed(mseed, start + <uint64_t>t))
        active = 0
        for i in range(n):
            v[i] = v0v[i]
            frozen[i] = 1 if v0v[i] == 0.0 else 0
            if not frozen[i]:
                active += 1
            tcnt[i] = 0
            tsum[i] = 0.0
            tssq[i] = 0.0
        traj_samples = [(0.0, [v[i] for i in range(n)])] if sample_every > 0 else None
        total = 0.0
        for i in range(n):
            total += v[i]
        max_drift = fabs(total - 1.0)
        steps = 0
        time = 0.0

        while active > 1:
            if steps >= cap:
                raise BudgetExceededError(
                    f"no absorption after {steps} steps (cap {cap})"
                )
            for i in range(n):
                vstart[i] = v[i]
                active_start[i] = 0 if frozen[i] else 1
            for k in range(n - 1):
                for l in range(k + 1, n):
                    if frozen[k] or frozen[l]:
                        continue
                    x = s * _normal(&rng)
                    if x >= 0.0:
                        gain = k
                        lose = l
                        amt = x
                    else:
                        gain = l
                        lose = k
                        amt = -x
                    if amt >= v[lose]:
                        amt = v[lose]
                        v[gain] += amt
                        v[lose] = 0.0
                        frozen[lose] = 1
                        active -= 1
                    else:
                        v[gain] += amt
                        v[lose] -= amt
            steps += 1
            time += dt
            for i in range(n):
                if active_start[i]:
                    inc = v[i] - vstart[i]
                    tcnt[i] += 1
                    tsum[i] += inc
                    tssq[i] += inc * inc
            total = 0.0
            for i in range(n):
                total += v[i]
            drift = fabs(total - 1.0)
            if drift > max_drift:
                max_drift = drift
            if sample_every > 0 and steps % sample_every == 0:
                traj_samples.append((time, [v[i] for i in range(n)]))

        for i in range(n):
            if not frozen[i]:
                out_v[t] = i
                break
        tau_v[t] = steps
        for i in range(n):
            icnt_v[i] += tcnt[i]
            isum_v[i] += tsum[i]
            issq_v[i] += tssq[i]
        if max_drift > chunk_max_drift:
            chunk_max_drift = max_drift
        if sample_every > 0:
            samples.append(traj_samples)

    return {
        "outcomes": outcomes,
        "taus": taus,
        "clocks": None,
        "inc_count": inc_count,
        "inc_sum": inc_sum,
        "inc_sumsq": inc_sumsq,
        "max_drift": chunk_max_drift,
        "samples": samples,
    }
