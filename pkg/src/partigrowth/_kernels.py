"""Compiled inner loops for the replica-parallel simulations.

Each replica owns a private splitmix64 state derived from (seed, stream), so
results are bit-for-bit reproducible and independent of the thread count:
replicas write only to their own output slots.

The jump-size law of the growing weight chain is inverted by ascending
cumulative summation, never renormalized; the per-term factor is the log-space
hyperbolic closed form of the visit probability.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

_GOLDEN = nb.uint64(0x9E3779B97F4A7C15)
_MIX1 = nb.uint64(0xBF58476D1CE4E5B9)
_MIX2 = nb.uint64(0x94D049BB133111EB)
_LOG2 = math.log(2.0)
_LOG_8S3PI = math.log(8.0 * math.sqrt(3.0) * math.pi)
_PI6 = math.pi / 6.0
_INV2_53 = 1.0 / 9007199254740992.0


@nb.njit(nb.types.UniTuple(nb.uint64, 2)(nb.uint64), cache=True, inline="always")
def _next64(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> nb.uint64(30))) * _MIX1
    z = (z ^ (z >> nb.uint64(27))) * _MIX2
    z = z ^ (z >> nb.uint64(31))
    return state, z


@nb.njit(nb.float64(nb.uint64), cache=True, inline="always")
def _u01(z):
    # in (0, 1]; never 0 so logs are safe
    return (np.float64(z >> nb.uint64(11)) + 1.0) * _INV2_53


@nb.njit(nb.float64(nb.int64), cache=True, inline="always")
def _log_visit(n):
    if n == 0:
        return 0.0
    w = 24.0 * n - 1.0
    A = _PI6 * math.sqrt(w)
    log_sinh = A - _LOG2 + math.log1p(-math.exp(-2.0 * A))
    log_den = 2.0 * A + math.log1p(math.exp(-4.0 * A) - math.exp(-2.0 * A))
    return _LOG_8S3PI + math.log(n) - 0.5 * math.log(w) + log_sinh - log_den


@nb.njit(
    nb.types.Tuple((nb.uint8[:], nb.int64[:], nb.int64[:], nb.uint8[:]))(
        nb.int64, nb.uint64[:], nb.float64[:], nb.int64
    ),
    parallel=True,
    cache=True,
)
def backward_hit_runs(n_target, keys, log_sigma, h_cap):
    """Run the growing weight chain from 0 until it reaches or jumps over
    n_target, once per key.  Returns (hit, final weight, steps, fault)."""
    reps = keys.shape[0]
    hits = np.zeros(reps, dtype=np.uint8)
    finals = np.zeros(reps, dtype=np.int64)
    steps = np.zeros(reps, dtype=np.int64)
    fault = np.zeros(reps, dtype=np.uint8)
    hmax = log_sigma.shape[0] - 1
    for i in nb.prange(reps):
        state = keys[i]
        m = nb.int64(0)
        nsteps = nb.int64(0)
        bad = False
        while m < n_target:
            state, z = _next64(state)
            u = _u01(z)
            lg_m = _log_visit(m)
            cum = 0.0
            h = nb.int64(0)
            # horizon extends until the cumulative reaches 1 - 1e-12; a draw
            # beyond that lands on the last extended jump size
            while cum < u and cum < 0.999999999999:
                h += 1
                if h > h_cap or h > hmax:
                    bad = True
                    break
                mh = m + h
                cum += math.exp(
                    _log_visit(mh) + log_sigma[h] - math.log(mh) - lg_m
                )
            if bad:
                break
            m += h
            nsteps += 1
        hits[i] = 1 if (m == n_target and not bad) else 0
        finals[i] = m
        steps[i] = nsteps
        fault[i] = 1 if bad else 0
    return hits, finals, steps, fault


@nb.njit(
    nb.int64[:](nb.int64, nb.float64, nb.float64[:], nb.uint64[:], nb.int32[:, :]),
    parallel=True,
    cache=True,
)
def pdc_uniform_batch(n, t, q_pow, keys, counts_out):
    """Exact uniform partitions of n by divide-and-conquer rejection.

    Part counts for sizes >= 2 are drawn from their unconditioned geometric
    laws; the count of 1s is forced to the residue and the attempt accepted
    with probability q^{residue}, which makes the output exactly uniform over
    the partitions of n.  counts_out[i, k] receives the multiplicity of k for
    sample i; the return value is the attempt count per sample.
    """
    ns = keys.shape[0]
    kmax = q_pow.shape[0] - 1
    attempts_out = np.zeros(ns, dtype=np.int64)
    for i in nb.prange(ns):
        state = keys[i]
        buf_k = np.empty(4096, dtype=np.int64)
        buf_c = np.empty(4096, dtype=np.int64)
        attempts = nb.int64(0)
        done = False
        while not done:
            attempts += 1
            total = nb.int64(0)
            nz = 0
            overflow = False
            for k in range(2, kmax + 1):
                state, z = _next64(state)
                u = _u01(z)
                if u < q_pow[k]:
                    c = np.int64((-math.log(u)) / (t * k))
                    total += k * c
                    if total > n or nz >= 4096:
                        overflow = True
                        break
                    buf_k[nz] = k
                    buf_c[nz] = c
                    nz += 1
            if not overflow:
                resid = n - total
                state, z = _next64(state)
                u = _u01(z)
                if u <= math.exp(-t * resid):
                    counts_out[i, 1] = np.int32(resid)
                    for j in range(nz):
                        counts_out[i, buf_k[j]] = np.int32(buf_c[j])
                    attempts_out[i] = attempts
                    done = True
    return attempts_out


@nb.njit(
    nb.int64[:](nb.float64, nb.float64[:], nb.uint64[:]),
    parallel=True,
    cache=True,
)
def gc_weight_batch(t, q_pow, keys):
    """Weights of independent grand-canonical draws (one per key)."""
    ns = keys.shape[0]
    kmax = q_pow.shape[0] - 1
    out = np.zeros(ns, dtype=np.int64)
    for i in nb.prange(ns):
        state = keys[i]
        total = nb.int64(0)
        for k in range(1, kmax + 1):
            state, z = _next64(state)
            u = _u01(z)
            if u < q_pow[k]:
                total += k * nb.int64((-math.log(u)) / (t * k))
        out[i] = total
    return out


@nb.njit(
    nb.int64[:](nb.int64, nb.float64, nb.float64[:], nb.uint64[:]),
    parallel=True,
    cache=True,
)
def rejection_attempt_counts(n, t, q_pow, keys):
    """Attempts (including the accepted draw) of plain rejection to weight n."""
    ns = keys.shape[0]
    kmax = q_pow.shape[0] - 1
    out = np.zeros(ns, dtype=np.int64)
    for i in nb.prange(ns):
        state = keys[i]
        attempts = nb.int64(0)
        done = False
        while not done:
            attempts += 1
            total = nb.int64(0)
            for k in range(1, kmax + 1):
                state, z = _next64(state)
                u = _u01(z)
                if u < q_pow[k]:
                    total += k * np.int64((-math.log(u)) / (t * k))
                    if total > n:
                        break
            if total == n:
                out[i] = attempts
                done = True
    return out
