"""Special functions and probability weights for the partition growth process.

Contents, in rough dependency order:

* the grand-canonical (geometric part count) measure and its log-probabilities;
* the jump intensity f, its tail F, and the inverse time change F^{-1};
* the level visit probability with its hyperbolic closed form, the
  time-cut-off variant, and the conditionally convergent series that the
  closed form resums;
* forward/backward one-step weight laws of the jump chains;
* two infinite divisor-sum identities with certified truncation bounds;
* the residue-series identity behind the closed form;
* the limit shape, the mean growth profile h, and exact integrals of both;
* mean/variance of the weight under the tuned grand-canonical measure.

Everything that can underflow a double is computed in log space; sums carry a
closed-form tail bound so that a reported residual is certified rather than
heuristic.  A high-precision path (mpmath, >= 50 significant digits) backs the
identity verifiers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.special import spence

from .counting import log_partition_count, sigma1, sigma1_sieve
from .logprob import LogProb
from .partitions import Partition

__all__ = [
    "LogProb",
    "IdentityCheck",
    "t_for_weight",
    "q_for_weight",
    "s_for_weight",
    "gc_log_prob",
    "log_partition_gf",
    "jump_intensity",
    "jump_intensity_tail",
    "jump_intensity_tail_inverse",
    "jump_intensity_divisor_form",
    "jump_intensity_tail_divisor_form",
    "log_visit_prob",
    "visit_prob",
    "visit_prob_series_paired",
    "visit_prob_series_accelerated",
    "visit_prob_after",
    "mp_visit_prob_after",
    "log_level_visit_prob",
    "forward_weight_logprob",
    "forward_weight_prob_exact",
    "backward_weight_logprob",
    "backward_row_tail_bound",
    "backward_normalization_residual",
    "divisor_identity_residual",
    "hyperbolic_series_value",
    "appendix_partial_sum",
    "appendix_series_residual",
    "visit_prob_from_appendix",
    "euler_product",
    "pentagonal_series",
    "limit_shape",
    "limit_shape_integral",
    "growth_profile",
    "growth_profile_integral",
    "ETA",
    "gc_moments",
]

_LOG2 = math.log(2.0)
_PI = math.pi
# smallest part of any truncated series relative to its partial sum
_REL_EPS = 1e-18
# sinh(A)/(2cosh(2A)-1) <= _SINH_RATIO_BOUND * e^{-A} for A >= 1
_SINH_RATIO_BOUND = 0.5 / (1.0 - math.exp(-2.0))
# A_n(h) >= _BETA * sqrt(h) for every n >= 0, h >= 1
_BETA = (_PI / 6.0) * math.sqrt(23.0)


# ---------------------------------------------------------------------------
# tuning of the grand canonical parameter to a target weight
# ---------------------------------------------------------------------------

def t_for_weight(n: int) -> float:
    """Inverse-temperature pi/sqrt(6n) that centers the weight near n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _PI / math.sqrt(6.0 * n)


def q_for_weight(n: int) -> float:
    """exp(-t_for_weight(n))."""
    return math.exp(-t_for_weight(n))


def s_for_weight(n: int) -> float:
    """Standard-clock time F(t_n) at which the growth process has mean weight ~ n."""
    return jump_intensity_tail(t_for_weight(n))


# ---------------------------------------------------------------------------
# grand canonical measure
# ---------------------------------------------------------------------------

def log_partition_gf(q: float) -> float:
    """log of prod_j 1/(1-q^j), the partition generating function at q."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0,1)")
    return jump_intensity_tail(-math.log(q))


def gc_log_prob(lam: Partition, q: float) -> LogProb:
    """Grand canonical probability of one partition: q^{weight} / P(q)."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0,1)")
    return LogProb(lam.weight * math.log(q) - log_partition_gf(q))


# ---------------------------------------------------------------------------
# jump intensity f, tail F, inverse of F
# ---------------------------------------------------------------------------

def _trunc_order(t: float) -> int:
    # e^{-Kt} < 1e-18 past this K
    return int(math.ceil(41.45 / t)) + 1


def jump_intensity(t: float) -> float:
    """f(t) = sum_k k e^{-kt} / (1 - e^{-kt}); also the mean weight at time t.

    Truncated once e^{-kt} < 1e-18, with the closed-form geometric tail
    estimate added back; relative error <= 1e-12.
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    K = _trunc_order(t)
    total = 0.0
    for lo in range(1, K + 1, 1_000_000):
        hi = min(lo + 1_000_000 - 1, K)
        k = np.arange(lo, hi + 1, dtype=np.float64)
        x = np.exp(-k * t)
        total += float(np.sum(k * x / (1.0 - x)))
    y = math.exp(-t)
    # sum_{k>K} k y^k = y^{K+1} ((K+1) - K y) / (1-y)^2, inflated by the
    # largest 1/(1-y^k) factor in the tail
    tail = y ** (K + 1) * ((K + 1) - K * y) / (1.0 - y) ** 2
    tail /= 1.0 - math.exp(-(K + 1) * t)
    return total + tail


def jump_intensity_tail(t: float) -> float:
    """F(t) = -sum_k log(1 - e^{-kt}); expected number of jumps after time t."""
    if t <= 0:
        raise ValueError("t must be > 0")
    K = _trunc_order(t)
    total = 0.0
    for lo in range(1, K + 1, 1_000_000):
        hi = min(lo + 1_000_000 - 1, K)
        k = np.arange(lo, hi + 1, dtype=np.float64)
        total += float(-np.sum(np.log1p(-np.exp(-k * t))))
    y = math.exp(-t)
    tail = y ** (K + 1) / (1.0 - y)  # leading term of the tail, certified small
    tail /= 1.0 - math.exp(-(K + 1) * t)
    return total + tail


def jump_intensity_divisor_form(t: float, hmax: int | None = None) -> float:
    """f(t) as the divisor-weighted exponential sum; cross-check path."""
    if t <= 0:
        raise ValueError("t must be > 0")
    H = hmax or _trunc_order(t)
    sig = sigma1_sieve(H)
    h = np.arange(1, H + 1, dtype=np.float64)
    return float(np.sum(sig[1:] * np.exp(-h * t)))


def jump_intensity_tail_divisor_form(t: float, hmax: int | None = None) -> float:
    """F(t) as sum_h sigma_1(h) e^{-th} / h; cross-check path."""
    if t <= 0:
        raise ValueError("t must be > 0")
    H = hmax or _trunc_order(t)
    sig = sigma1_sieve(H)
    h = np.arange(1, H + 1, dtype=np.float64)
    return float(np.sum(sig[1:] / h * np.exp(-h * t)))


def jump_intensity_tail_inverse(s: float, rel_tol: float = 1e-11, t0: float | None = None) -> float:
    """t with F(t) = s, by safeguarded Newton seeded at pi^2/(6s).

    F is a strictly decreasing bijection of (0, inf) onto itself, so the root
    is unique; the returned t satisfies |F(t) - s| <= rel_tol * s.  A warm
    starting point t0 (e.g. the previous root on a monotone sweep) cuts the
    iteration count.
    """
    if s <= 0:
        raise ValueError("s must be > 0")
    if t0 is not None and t0 > 0:
        t = t0
    else:
        t = _PI * _PI / (6.0 * s) if s > 0.5 else -math.log1p(-math.exp(-s))
    # bracket the root: F decreasing, so F(lo) >= s >= F(hi)
    lo, hi = t, t
    while jump_intensity_tail(lo) < s:
        lo /= 2.0
    while jump_intensity_tail(hi) > s:
        hi *= 2.0
    for _ in range(100):
        Ft = jump_intensity_tail(t)
        if abs(Ft - s) <= rel_tol * s:
            return t
        if Ft > s:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
        step = (Ft - s) / jump_intensity(t)  # F' = -f
        t_new = t + step
        if not (lo < t_new < hi):
            t_new = 0.5 * (lo + hi)
        t = t_new
    raise RuntimeError(f"time-change inversion did not converge for s={s}")


# ---------------------------------------------------------------------------
# visit probability: closed form, cut-off series, resummed series
# ---------------------------------------------------------------------------

def _log_visit_prob_float(n: int) -> float:
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0.0  # by convention the chain visits the empty partition a.s.
    w = 24.0 * n - 1.0
    A = (_PI / 6.0) * math.sqrt(w)
    log_sinh = A - _LOG2 + math.log1p(-math.exp(-2.0 * A))
    log_den = 2.0 * A + math.log1p(math.exp(-4.0 * A) - math.exp(-2.0 * A))
    return (
        math.log(8.0 * math.sqrt(3.0) * _PI * n) - 0.5 * math.log(w) + log_sinh - log_den
    )


def log_visit_prob(n: int) -> LogProb:
    """Probability that the growth chain passes through one fixed partition of n.

    Closed hyperbolic form, evaluated in log space (the value underflows
    doubles near n ~ 1400).  Depends on the partition only through the weight.
    """
    return LogProb(_log_visit_prob_float(n))


def visit_prob(n: int) -> float:
    """Convenience: exp of log_visit_prob; underflows for large n."""
    return log_visit_prob(n).value


def _mp_log_visit_prob(n: int) -> mpmath.mpf:
    if n == 0:
        return mpmath.mpf(0)
    w = mpmath.mpf(24 * n - 1)
    A = mpmath.pi / 6 * mpmath.sqrt(w)
    return (
        mpmath.log(8 * mpmath.sqrt(3) * mpmath.pi * n)
        - mpmath.log(w) / 2
        + mpmath.log(mpmath.sinh(A))
        - mpmath.log(2 * mpmath.cosh(2 * A) - 1)
    )


def _pair_term(n: int, j: int) -> float:
    # symmetric combination of the +j and -j terms of the alternating series
    a = n + j * (3 * j + 1) // 2
    b = n + j * (3 * j - 1) // 2
    s = n / a + n / b
    return s if j % 2 == 0 else -s


def visit_prob_series_paired(n: int, pairs: int) -> float:
    """Partial sum of the alternating visit-probability series.

    Terms are folded into symmetric (+k, -k) pairs in increasing k; the pairs
    then decay like k^{-2}, which makes the conditionally convergent series
    summable in a fixed order.  Exact floating accumulation via fsum.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.fsum([1.0] + [_pair_term(n, j) for j in range(1, pairs + 1)])


def visit_prob_series_accelerated(n: int, dps: int = 60) -> float:
    """The full value of the alternating series, by alternating-series
    acceleration on the paired terms (the raw k^{-2} tail is hopeless against
    targets like exp(-pi sqrt(2n/3)))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with mpmath.workdps(dps):
        def pair(j):
            jj = int(j)
            a = n + jj * (3 * jj + 1) // 2
            b = n + jj * (3 * jj - 1) // 2
            s = mpmath.mpf(n) / a + mpmath.mpf(n) / b
            return s if jj % 2 == 0 else -s

        total = 1 + mpmath.nsum(pair, [1, mpmath.inf], method="a")
        return float(total)


def visit_prob_after(n: int, tau: float) -> LogProb:
    """Visit probability for the chain started (cut off) at time tau > 0.

    Absolutely convergent alternating series in symmetric pairs; summation
    stops once a pair drops below 1e-18 of the running total.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if tau <= 0:
        raise ValueError("tau must be > 0")
    terms = [math.exp(-n * tau)]
    j = 1
    while True:
        a = n + j * (3 * j + 1) // 2
        b = n + j * (3 * j - 1) // 2
        s = n * math.exp(-a * tau) / a + n * math.exp(-b * tau) / b
        terms.append(s if j % 2 == 0 else -s)
        partial = math.fsum(terms)
        if s < _REL_EPS * abs(partial) and j > 4:
            return LogProb.from_value(partial)
        j += 1


def mp_visit_prob_after(n: int, tau: float, dps: int = 50) -> float:
    """High-precision variant of visit_prob_after (for tau near 0 the float
    path loses the tiny limit value to cancellation)."""
    with mpmath.workdps(dps):
        tau_mp = mpmath.mpf(tau)
        total = mpmath.exp(-n * tau_mp)
        j = 1
        while True:
            a = n + j * (3 * j + 1) // 2
            b = n + j * (3 * j - 1) // 2
            s = n * mpmath.exp(-a * tau_mp) / a + n * mpmath.exp(-b * tau_mp) / b
            total += s if j % 2 == 0 else -s
            if s < mpmath.mpf(10) ** (-dps) * abs(total) and j > 4:
                return float(total)
            j += 1


def log_level_visit_prob(n: int) -> LogProb:
    """Probability that the chain visits weight n at all: p(n) * visit prob."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return LogProb.one()
    return LogProb(_log_visit_prob_float(n) + log_partition_count(n))


# ---------------------------------------------------------------------------
# one-step weight laws of the jump chains
# ---------------------------------------------------------------------------

def forward_weight_logprob(n: int, m: int) -> LogProb:
    """One-step law of the shrinking weight chain: p(m) sigma_1(n-m) / (n p(n))."""
    if not 0 <= m < n:
        raise ValueError("need 0 <= m < n")
    return LogProb(
        log_partition_count(m)
        + math.log(sigma1(n - m))
        - math.log(n)
        - log_partition_count(n)
    )


def forward_weight_prob_exact(n: int, m: int) -> Fraction:
    """Exact rational value of the forward weight law (row sums to 1 exactly)."""
    from .counting import forward_weight_prob_exact as _exact

    return _exact(n, m)


def backward_weight_logprob(n: int, h: int) -> LogProb:
    """One-step law of the growing weight chain: jump n -> n+h.

    Value g(n+h) sigma_1(h) / ((n+h) g(n)) where g is the visit probability.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    return LogProb(
        _log_visit_prob_float(n + h)
        + math.log(sigma1(h))
        - math.log(n + h)
        - _log_visit_prob_float(n)
    )


# ---------------------------------------------------------------------------
# certified tails for the hyperbolic divisor sums
# ---------------------------------------------------------------------------

def _log_exp_poly_tail(a: float, qpow: int) -> float:
    """log of integral_a^inf v^q e^{-v} dv (exact closed form, log space)."""
    # e^{-a} * sum_{i=0}^q (q!/i!) a^i; factor out a^q to stay in range
    acc = 0.0
    fall = 1.0
    for i in range(qpow, -1, -1):
        acc += fall * a ** (i - qpow)
        fall *= i if i > 0 else 1.0
    return -a + qpow * math.log(a) + math.log(acc)


def _log_hyperbolic_tail(n: int, H: int, power: int = 0) -> float:
    """log of a certified bound on sum_{h>H} sigma_1(h) h^power S_n(h), where
    S_n(h) = sinh(A)/(A(2cosh(2A)-1)) at A = (pi/6) sqrt(24(n+h)-1).

    Substituting v = A makes the summand <= c v^{5+2 power} e^{-v}; the sum is
    compared to the exact incomplete-gamma integral, valid once the integrand
    is decreasing, i.e. (2+power) sqrt(24(n+H)) <= 2 pi H; returns +inf when
    that precondition fails so callers extend the horizon.
    """
    p = power
    if (2 + p) * math.sqrt(24.0 * (n + H + 1)) > 2.0 * _PI * H:
        return math.inf
    A_H = (_PI / 6.0) * math.sqrt(24.0 * (n + H) - 1.0)
    qpow = 5 + 2 * p
    log_c = (
        math.log(_SINH_RATIO_BOUND)
        + (2 + p) * math.log(3.0 / (2.0 * _PI * _PI))
        + math.log(3.0 / (_PI * _PI))
    )
    return log_c + _log_exp_poly_tail(A_H, qpow)


def _hyperbolic_tail_raw(H: int, n: int = 0) -> float:
    """Certified bound on sum_{h>H} sigma_1(h) S_n(h), linear scale."""
    lg = _log_hyperbolic_tail(n, H, 0)
    return math.exp(min(lg, 700.0))


def _log_hyperbolic_term(n: int, h: int) -> float:
    # log of sinh(A)/(A (2cosh(2A)-1)) at A = (pi/6) sqrt(24(n+h)-1)
    w = 24.0 * (n + h) - 1.0
    A = (_PI / 6.0) * math.sqrt(w)
    log_sinh = A - _LOG2 + math.log1p(-math.exp(-2.0 * A))
    log_den = 2.0 * A + math.log1p(math.exp(-4.0 * A) - math.exp(-2.0 * A))
    return log_sinh - math.log(A) - log_den


def log_backward_row_tail_bound(n: int, H: int, power: int = 0) -> float:
    """log of a certified bound on sum_{h>H} h^power * (jump-size law at n)."""
    log_c = math.log(4.0 * math.sqrt(3.0) * _PI * _PI / 3.0)
    return log_c + _log_hyperbolic_tail(n, H, power) - _log_visit_prob_float(n)


def backward_row_tail_bound(n: int, H: int) -> float:
    """Certified bound on the backward-weight-law mass beyond jump size H."""
    return math.exp(min(log_backward_row_tail_bound(n, H), 700.0))


@dataclass(frozen=True)
class IdentityCheck:
    """Outcome of one certified identity verification."""

    name: str
    n: int
    residual: float
    tail_bound: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def _row_horizon(n: int, target_abs: float) -> int:
    H = max(64, n // 2)
    log_target = math.log(target_abs)
    while _log_hyperbolic_tail(n, H) > log_target and H < 100_000_000:
        H *= 2
    return H


def backward_normalization_residual(
    n: int, tolerance: float = 1e-9, dps: int | None = None
) -> IdentityCheck:
    """Relative residual of sum_{h>=1} g(n+h) sigma_1(h)/(n+h) = g(n).

    The left side is truncated once a certified closed-form bound puts the
    remaining mass below 1e-3 * tolerance * g(n); with dps set, the summation
    runs in mpmath at that many digits.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    c = 4.0 * math.sqrt(3.0) * _PI * _PI / 3.0
    g_n = math.exp(_log_visit_prob_float(n))
    target = tolerance * 1e-3 * g_n / c
    H = _row_horizon(n, target)
    sig = sigma1_sieve(H)
    if dps is None:
        terms = [
            sig[h] * math.exp(_log_hyperbolic_term(n, h)) for h in range(1, H + 1)
        ]
        lhs = c * math.fsum(terms)
        residual = abs(lhs - g_n) / g_n
    else:
        with mpmath.workdps(dps):
            cc = 4 * mpmath.sqrt(3) * mpmath.pi**2 / 3
            total = mpmath.mpf(0)
            for h in range(1, H + 1):
                A = mpmath.pi / 6 * mpmath.sqrt(24 * (n + h) - 1)
                total += (
                    int(sig[h]) * mpmath.sinh(A) / (A * (2 * mpmath.cosh(2 * A) - 1))
                )
            g_mp = mpmath.exp(_mp_log_visit_prob(n))
            residual = float(abs(cc * total - g_mp) / g_mp)
    bound = math.exp(min(log_backward_row_tail_bound(n, H), 700.0))
    return IdentityCheck("backward-normalization", n, residual, bound, tolerance)


def divisor_identity_residual(
    n: int, tolerance: float = 1e-9, dps: int | None = None
) -> IdentityCheck:
    """Relative residual of the hyperbolic divisor-sum identity.

    sum_h sigma_1(h) sinh(A_n(h)) / (A_n(h)(2cosh(2A_n(h))-1))  equals
    n sinh(A_n(0)) / (A_n(0)(2cosh(2A_n(0))-1)), with A_n(h) the hyperbolic
    argument (pi/6) sqrt(24(n+h)-1); for n = 0 the right side degenerates to
    sqrt(3)/(4 pi^2).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        rhs = math.sqrt(3.0) / (4.0 * _PI * _PI)
    else:
        rhs = n * math.exp(_log_hyperbolic_term(n, 0))
    target = tolerance * 1e-3 * rhs
    H = _row_horizon(n, target)
    sig = sigma1_sieve(H)
    if dps is None:
        terms = [
            sig[h] * math.exp(_log_hyperbolic_term(n, h)) for h in range(1, H + 1)
        ]
        lhs = math.fsum(terms)
        residual = abs(lhs - rhs) / rhs
    else:
        with mpmath.workdps(dps):
            total = mpmath.mpf(0)
            for h in range(1, H + 1):
                A = mpmath.pi / 6 * mpmath.sqrt(24 * (n + h) - 1)
                total += (
                    int(sig[h]) * mpmath.sinh(A) / (A * (2 * mpmath.cosh(2 * A) - 1))
                )
            if n == 0:
                rhs_mp = mpmath.sqrt(3) / (4 * mpmath.pi**2)
            else:
                A0 = mpmath.pi / 6 * mpmath.sqrt(24 * n - 1)
                rhs_mp = n * mpmath.sinh(A0) / (A0 * (2 * mpmath.cosh(2 * A0) - 1))
            residual = float(abs(total - rhs_mp) / rhs_mp)
    bound = math.exp(min(_log_hyperbolic_tail(n, H) - math.log(rhs), 700.0))
    return IdentityCheck("hyperbolic-divisor", n, residual, bound, tolerance)


# ---------------------------------------------------------------------------
# residue series behind the closed form
# ---------------------------------------------------------------------------

def hyperbolic_series_value(x: float) -> float:
    """pi sinh(pi x/6) / (sqrt(3) (2 cosh(pi x/3) - 1)); poles at odd x = 6k+-1."""
    if x <= 0:
        raise ValueError("x must be > 0")
    return _PI * math.sinh(_PI * x / 6.0) / (math.sqrt(3.0) * (2.0 * math.cosh(_PI * x / 3.0) - 1.0))


def appendix_partial_sum(x: float, K: int, average: bool = False) -> float:
    """Symmetric partial sum sum_{|k|<=K} (-1)^{k+1} x / ((6k+1)^2 + x^2).

    With average=True returns the mean of the K and K+1 partial sums, which
    cancels the leading alternating-tail error (useful when the plain partial
    sum converges too slowly for a target).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    ks = np.arange(1, K + 2, dtype=np.float64)
    sign = np.where(ks % 2 == 0, -1.0, 1.0)  # (-1)^{k+1}
    pair = sign * x * (1.0 / ((6 * ks + 1) ** 2 + x * x) + 1.0 / ((6 * ks - 1) ** 2 + x * x))
    head = -x / (1.0 + x * x)  # k = 0 term of (-1)^{k+1} x/((6k+1)^2+x^2)
    s_k = math.fsum([head] + pair[:K].tolist())
    if not average:
        return s_k
    s_k1 = s_k + float(pair[K])
    return 0.5 * (s_k + s_k1)


def appendix_series_residual(x: float, K: int) -> float:
    """|closed form + symmetric partial sum|; the identity says the sum is 0."""
    return abs(hyperbolic_series_value(x) + appendix_partial_sum(x, K))


def visit_prob_from_appendix(n: int, K: int = 3_000_000, average: bool = True) -> float:
    """Visit probability of weight n rebuilt from the residue series alone:
    evaluate the series at x = sqrt(24n-1) and scale by 24n/x."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = math.sqrt(24.0 * n - 1.0)
    return -(24.0 * n / x) * appendix_partial_sum(x, K, average=average)


# ---------------------------------------------------------------------------
# Euler product / pentagonal series
# ---------------------------------------------------------------------------

def euler_product(q: float, J: int | None = None) -> float:
    """prod_{j<=J} (1 - q^j); J defaults to the 1e-25 truncation order."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0,1)")
    t = -math.log(q)
    J = J or int(math.ceil(57.6 / t)) + 1
    j = np.arange(1, J + 1, dtype=np.float64)
    return float(np.exp(np.sum(np.log1p(-np.exp(-j * t)))))


def pentagonal_series(q: float, kmax: int | None = None) -> float:
    """sum_k (-1)^k q^{k(3k+1)/2} over symmetric k; matches the Euler product."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0,1)")
    if kmax is None:
        kmax = 1
        while q ** (kmax * (3 * kmax - 1) // 2) > 1e-25:
            kmax += 1
    terms = [1.0]
    for k in range(1, kmax + 1):
        s = q ** (k * (3 * k + 1) // 2) + q ** (k * (3 * k - 1) // 2)
        terms.append(s if k % 2 == 0 else -s)
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# limit shape and growth profile
# ---------------------------------------------------------------------------

_A_SHAPE = _PI / math.sqrt(6.0)
ETA = 2.0 * math.sqrt(6.0) / _PI  # integral of the growth profile


def limit_shape(x: float) -> float:
    """The scaled-diagram limit curve y(x) = -(sqrt 6/pi) log(1 - e^{-pi x/sqrt 6})."""
    if x <= 0:
        raise ValueError("x must be > 0")
    return -math.log1p(-math.exp(-_A_SHAPE * x)) / _A_SHAPE


def _dilog(w):
    # Li_2(w) for w in [0, 1]; scipy's spence(z) is Li_2(1-z)
    return spence(1.0 - np.asarray(w, dtype=np.float64))


def limit_shape_integral(u, v):
    """Exact integral of the limit shape over [u, v] (dilogarithm form).

    Accepts arrays; u = 0 is allowed (the endpoint singularity is integrable).
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return -(6.0 / _PI**2) * (_dilog(np.exp(-_A_SHAPE * v)) - _dilog(np.exp(-_A_SHAPE * u)))


def growth_profile(x: float) -> float:
    """Mean rows added above width x per unit rescaled step of the growth chain:

        h(x) = sqrt6 x e^{-ax} / (pi (1-e^{-ax})) - 6 log(1-e^{-ax}) / pi^2,

    with a = pi/sqrt6.  Diverges logarithmically at 0, integrates to ETA.
    """
    if x <= 0:
        raise ValueError("x must be > 0")
    e = math.exp(-_A_SHAPE * x)
    return (math.sqrt(6.0) * x * e / (_PI * (1.0 - e))) - 6.0 * math.log1p(-e) / _PI**2


def growth_profile_integral(u, v):
    """Exact integral of the growth profile over [u, v] (u = 0 allowed).

    Uses h = (eta/2)(y - x y') and the dilogarithm antiderivative of y, so the
    log singularity at 0 is integrated exactly rather than quadratured.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    y_int = limit_shape_integral(u, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        yu = np.where(u > 0, -np.log1p(-np.exp(-_A_SHAPE * u)) / _A_SHAPE, 0.0)
    uyu = np.where(u > 0, u * yu, 0.0)  # x y(x) -> 0 as x -> 0
    yv = -np.log1p(-np.exp(-_A_SHAPE * v)) / _A_SHAPE
    return (ETA / 2.0) * (2.0 * y_int - (v * yv - uyu))


# ---------------------------------------------------------------------------
# weight moments under the tuned grand canonical measure
# ---------------------------------------------------------------------------

def gc_moments(n: int) -> tuple[float, float]:
    """(mean, variance) of the weight under the grand canonical measure at t_n.

    The mean is literally jump_intensity(t_n) (same series); the variance adds
    the squared geometric factor.  Certified integral tail bounds are added.
    """
    t = t_for_weight(n)
    mean = jump_intensity(t)
    K = _trunc_order(t)
    var = 0.0
    for lo in range(1, K + 1, 1_000_000):
        hi = min(lo + 1_000_000 - 1, K)
        k = np.arange(lo, hi + 1, dtype=np.float64)
        x = np.exp(-k * t)
        var += float(np.sum(k * k * x / (1.0 - x) ** 2))
    # integral comparison for the remainder (integrand decreasing there)
    eK = math.exp(-K * t)
    var_tail = eK * (K * K / t + 2 * K / t**2 + 2 / t**3) / (1.0 - eK) ** 2
    return mean, var + var_tail
