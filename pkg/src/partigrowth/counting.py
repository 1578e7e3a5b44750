"""Exact integer combinatorics: partition counts, divisor sums, and the
weighted convolution recurrence tying them together.

Everything here is arbitrary-precision integer arithmetic; nothing is allowed
to round.  Memo tables grow under the interpreter lock and all parallel code
paths precompute their tables before fanning out, so the functions are safe
to call from reductions.  The partition counting function is evaluated with
the pentagonal recurrence

    p(n) = sum_{k>=1} (-1)^{k+1} [ p(n - k(3k-1)/2) + p(n - k(3k+1)/2) ],

which costs O(sqrt(n)) big-integer additions per value and is comfortably
exact up to n = 10^5.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

__all__ = [
    "partition_count",
    "partition_counts_upto",
    "log_partition_count",
    "sigma1",
    "sigma1_sieve",
    "np_recursion_residual",
    "np_recursion_max_residual",
    "hardy_ramanujan_estimate",
    "log_hardy_ramanujan",
    "strict_partition_count",
    "strict_partition_counts_upto",
    "forward_weight_prob_exact",
]

_pcache: list[int] = [1]  # p(0)


def partition_count(n: int) -> int:
    """Exact number of partitions of n (memoized pentagonal recurrence)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    while len(_pcache) <= n:
        m = len(_pcache)
        total = 0
        k = 1
        while True:
            g1 = m - k * (3 * k - 1) // 2
            if g1 < 0:
                break
            term = _pcache[g1]
            g2 = g1 - k
            if g2 >= 0:
                term += _pcache[g2]
            total += term if k % 2 == 1 else -term
            k += 1
        _pcache.append(total)
    return _pcache[n]


def partition_counts_upto(n: int) -> list[int]:
    """The list [p(0), ..., p(n)]."""
    partition_count(n)
    return _pcache[: n + 1]


def log_partition_count(n: int) -> float:
    """Natural log of p(n) as a float (exact integer under the hood)."""
    return math.log(partition_count(n))


def sigma1(h: int) -> int:
    """Sum of the divisors of h, by trial division up to sqrt(h)."""
    if h < 1:
        raise ValueError("h must be >= 1")
    total = 0
    d = 1
    while d * d <= h:
        if h % d == 0:
            total += d
            q = h // d
            if q != d:
                total += q
        d += 1
    return total


def sigma1_sieve(hmax: int) -> np.ndarray:
    """Array s with s[h] = sigma_1(h) for 1 <= h <= hmax (s[0] = 0)."""
    s = np.zeros(hmax + 1, dtype=np.int64)
    for d in range(1, hmax + 1):
        s[d::d] += d
    return s


def np_recursion_residual(n: int) -> int:
    """|n p(n) - sum_{m<n} p(m) sigma_1(n-m)|; zero when the books balance."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ps = partition_counts_upto(n)
    conv = sum(ps[m] * sigma1(n - m) for m in range(n))
    return abs(n * ps[n] - conv)


def np_recursion_max_residual(nmax: int) -> int:
    """Max residual of the weighted convolution recurrence over 1 <= n <= nmax.

    The full triangle of convolutions is evaluated in one shot by packing both
    coefficient sequences into big integers with a fixed slot width (Kronecker
    substitution); a single big-int multiply then yields every convolution
    exactly, with no possibility of inter-slot carries.
    """
    ps = partition_counts_upto(nmax)
    sig = [0] + [int(x) for x in sigma1_sieve(nmax)[1:]]
    # slot width: any convolution coefficient is n*p(n) at most
    maxcoef = nmax * ps[nmax]
    width = (maxcoef.bit_length() + 8) // 8 + 1
    pack_p = b"".join(v.to_bytes(width, "little") for v in ps)
    pack_s = b"".join(v.to_bytes(width, "little") for v in sig)
    prod = int.from_bytes(pack_p, "little") * int.from_bytes(pack_s, "little")
    raw = prod.to_bytes(2 * (nmax + 1) * width + width, "little")
    worst = 0
    for n in range(1, nmax + 1):
        conv = int.from_bytes(raw[n * width : (n + 1) * width], "little")
        worst = max(worst, abs(n * ps[n] - conv))
    return worst


def log_hardy_ramanujan(n: int) -> float:
    """Natural log of the two-term asymptotic estimate of p(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    w = 24 * n - 1
    root = math.sqrt(w)
    return (
        math.log(2 * math.sqrt(3.0))
        - math.log(w)
        + math.pi * root / 6.0
        + math.log1p(-6.0 / (math.pi * root))
    )


def hardy_ramanujan_estimate(n: int) -> float:
    """Two-term asymptotic estimate of p(n) as a float (log-space internally).

    Returns inf once the value exceeds the double range (n around 2*10^5);
    use log_hardy_ramanujan for comparisons at that scale.
    """
    lg = log_hardy_ramanujan(n)
    if lg > 709.0:
        return math.inf
    return math.exp(lg)


_strict_cache: list[int] = [1]  # counts of partitions into distinct parts


def strict_partition_count(n: int) -> int:
    """Exact number of partitions of n into distinct parts."""
    if n < 0:
        raise ValueError("n must be >= 0")
    global _strict_cache
    if len(_strict_cache) <= n:
        # rebuild the product prefix \prod_k (1 + q^k) up to degree n
        dp = [0] * (n + 1)
        dp[0] = 1
        for k in range(1, n + 1):
            for m in range(n, k - 1, -1):
                dp[m] += dp[m - k]
        _strict_cache = dp
    return _strict_cache[n]


def strict_partition_counts_upto(n: int) -> list[int]:
    """The list of strict-partition counts for 0..n."""
    strict_partition_count(n)
    return _strict_cache[: n + 1]


def forward_weight_prob_exact(n: int, m: int) -> Fraction:
    """Exact rational p(m) sigma_1(n-m) / (n p(n)) for 0 <= m < n.

    This is the one-step weight law of the shrinking jump chain; the row sums
    to exactly 1 because of the convolution recurrence.
    """
    if not 0 <= m < n:
        raise ValueError("need 0 <= m < n")
    return Fraction(partition_count(m) * sigma1(n - m), n * partition_count(n))
