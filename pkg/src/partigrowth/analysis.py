"""Statistical verdicts: limit-shape distances, the deterministic shape-flow
iteration, odd/even part-count limit laws, the weight-sandwich monotonicity
inequality, and the goodness-of-fit statistics used to judge simulations.

The monotonicity verifier is the only place that mixes exact and floating
arithmetic: the lower bound is checked in exact rationals, the upper bound as
a certified floating interval (its series is infinite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.special import erfc, gammaincc

from .counting import forward_weight_prob_exact, partition_count
from .chains import _jump_weight_probs
from .measures import (
    ETA,
    growth_profile,
    growth_profile_integral,
    limit_shape,
    log_backward_row_tail_bound,
)
from .partitions import Partition, enumerate_partitions, growth_leq

__all__ = [
    "StepFunction",
    "build_shape_grid",
    "exp_seed_shape",
    "shape_flow_step",
    "shape_flow_iterate",
    "shape_flow_pointwise",
    "shape_sup_distance",
    "shape_distance",
    "sup_distance_from_counts",
    "odd_even_scaled",
    "odd_even_from_counts",
    "odd_even_centering",
    "length_centering",
    "LimitingCdfs",
    "limiting_cdfs",
    "MonotoneStatistic",
    "verify_statistic_monotone",
    "SandwichCheck",
    "verify_weight_sandwich",
    "STATISTICS",
    "ks_statistic",
    "chi_square",
]

_EULER_GAMMA = float(np.euler_gamma)


# ---------------------------------------------------------------------------
# unit-area step functions and the deterministic shape flow
# ---------------------------------------------------------------------------

@dataclass
class StepFunction:
    """Right-continuous piecewise-constant function on [edges[0], edges[-1]).

    Cell i carries the constant values[i] on [edges[i], edges[i+1]); the
    function is 0 outside.  Integrals are exact sums of cell areas.
    """

    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.edges) != len(self.values) + 1:
            raise ValueError("need one more edge than values")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("edges must be strictly increasing")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        idx = np.searchsorted(self.edges, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(self.values))
        out = np.zeros_like(x, dtype=np.float64)
        out[inside] = self.values[idx[inside]]
        return out if out.ndim else float(out)

    def integral(self) -> float:
        return float(np.sum(self.values * np.diff(self.edges)))

    def cumulative_at(self, x) -> np.ndarray:
        """Exact integral from the left end to x (vectorized, clamped)."""
        cum = np.concatenate([[0.0], np.cumsum(self.values * np.diff(self.edges))])
        x = np.clip(np.asarray(x, dtype=np.float64), self.edges[0], self.edges[-1])
        return np.interp(x, self.edges, cum)

    def normalized(self) -> "StepFunction":
        return StepFunction(self.edges, self.values / self.integral())

    @property
    def unit_area(self) -> bool:
        return abs(self.integral() - 1.0) <= 1e-12


def build_shape_grid(x_min: float = 1e-4, x_max: float = 50.0, cells: int = 4000) -> np.ndarray:
    """Geometric grid refined toward 0 (where the growth profile diverges),
    with one extra cell [0, x_min) so areas are exact down to the origin."""
    return np.concatenate([[0.0], np.geomspace(x_min, x_max, cells)])


def exp_seed_shape(edges: np.ndarray) -> StepFunction:
    """The unit-area seed e^{-x}, discretized by exact cell averages."""
    u, v = edges[:-1], edges[1:]
    vals = (np.exp(-u) - np.exp(-v)) / (v - u)
    return StepFunction(edges, vals).normalized()


def shape_flow_step(y: StepFunction, r: float) -> StepFunction:
    """One application of the deterministic growth-flow operator:

        (A_r y)(x) = (y(x c) + r h(x c)) / c,   c = sqrt(1 + r eta),

    i.e. add r times the mean growth profile, then rescale both axes to keep
    unit area.  Cell averages of the image are computed exactly (the profile
    has a closed-form antiderivative) and renormalized on the grid.
    """
    if r <= 0:
        raise ValueError("r must be > 0")
    c = math.sqrt(1.0 + r * ETA)
    a = y.edges * c
    y_ints = np.diff(y.cumulative_at(a))
    h_ints = growth_profile_integral(a[:-1], a[1:])
    vals = (y_ints + r * h_ints) / (c * np.diff(y.edges) * c)
    return StepFunction(y.edges, vals).normalized()


def shape_flow_iterate(y: StepFunction, r: float, iterations: int) -> StepFunction:
    """Iterate the growth-flow operator; every iterate is renormalized to
    unit area on the grid."""
    for _ in range(iterations):
        y = shape_flow_step(y, r)
    return y


def shape_flow_pointwise(y: Callable[[float], float], x: float, r: float) -> float:
    """The operator applied to a smooth function at one point (no grid);
    used to compare one small step against its linearization."""
    c = math.sqrt(1.0 + r * ETA)
    return (y(x * c) + r * growth_profile(x * c)) / c


def shape_sup_distance(y: StepFunction, lo: float = 0.1, hi: float = 5.0) -> float:
    """sup over grid cells intersecting [lo, hi] of |cell value - limit shape
    at the cell midpoint|."""
    mids = 0.5 * (y.edges[:-1] + y.edges[1:])
    mask = (mids >= lo) & (mids <= hi)
    lim = np.array([limit_shape(x) for x in mids[mask]])
    return float(np.max(np.abs(y.values[mask] - lim)))


# ---------------------------------------------------------------------------
# scaled-diagram distance to the limit shape
# ---------------------------------------------------------------------------

def sup_distance_from_counts(counts: np.ndarray, n: int, x0: float) -> float:
    """sup_{x > x0} |Y(x sqrt n)/sqrt n - y(x)| for a partition given as a
    part-count vector (counts[k] = multiplicity of k).

    The scaled diagram is constant between breakpoints k/sqrt(n), so the sup
    is attained at a breakpoint (from either side), at x0 itself, or at the
    abscissa where the diagram ends.
    """
    rn = math.sqrt(n)
    ks = np.nonzero(counts)[0]
    ks = ks[ks > 0]
    if len(ks) == 0:
        return limit_shape(x0)
    cum = np.cumsum(counts[ks][::-1])[::-1].astype(np.float64)  # parts >= k
    xs = ks / rn
    y_at = cum / rn
    y_above = y_at - counts[ks] / rn
    mask = xs >= x0
    best = 0.0
    if mask.any():
        lim = np.array([limit_shape(x) for x in xs[mask]])
        best = float(
            max(np.max(np.abs(y_at[mask] - lim)), np.max(np.abs(y_above[mask] - lim)))
        )
    # value at x0 itself (diagram height counts parts >= x0 sqrt n)
    kx0 = math.ceil(x0 * rn - 1e-9)
    y_x0 = float(counts[ks[ks >= kx0]].sum()) / rn
    best = max(best, abs(y_x0 - limit_shape(x0)))
    # beyond the largest part the diagram is 0 and the shape keeps decaying
    best = max(best, limit_shape(max(float(ks[-1]) / rn, x0)))
    return best


def shape_distance(lam: Partition, x0: float, n: int | None = None) -> float:
    """sup_{x > x0} |Y(x sqrt n)/sqrt n - y(x)| for a Partition (n defaults to
    the weight; passing n allows judging a diagram against a foreign scale)."""
    if not lam.parts:
        raise ValueError("the empty partition has no scaled diagram")
    if x0 <= 0:
        raise ValueError("x0 must be > 0")
    n = n or lam.weight
    counts = np.zeros(lam.parts[0] + 1, dtype=np.int64)
    for k, c in lam.counts.items():
        counts[k] = c
    return sup_distance_from_counts(counts, n, x0)


# ---------------------------------------------------------------------------
# odd/even part counts and length scalings
# ---------------------------------------------------------------------------

def odd_even_centering(n: int) -> float:
    """Centering constant log(n)/4 - log(2 pi / sqrt 6)/2 for both counts."""
    return 0.25 * math.log(n) - 0.5 * math.log(2.0 * math.pi / math.sqrt(6.0))


def odd_even_scaled(lam: Partition) -> tuple[float, float]:
    """Centered and scaled odd/even part counts of a partition of n >= 1."""
    n = lam.weight
    if n < 1:
        raise ValueError("need a non-empty partition")
    lo = sum(c for k, c in lam.counts.items() if k % 2 == 1)
    le = lam.length - lo
    scale = math.pi / math.sqrt(6.0 * n)
    a = odd_even_centering(n)
    return scale * lo - a, scale * le - a


def odd_even_from_counts(counts: np.ndarray, n: int) -> tuple[float, float, float]:
    """(x, y, length_stat) for a part-count vector: the two centered odd/even
    coordinates plus the centered length statistic."""
    lo = float(counts[1::2].sum())
    le = float(counts[2::2].sum())
    scale = math.pi / math.sqrt(6.0 * n)
    a = odd_even_centering(n)
    ell = scale * (lo + le) - 0.5 * math.log(n) + math.log(math.pi / math.sqrt(6.0))
    return scale * lo - a, scale * le - a, ell


def length_centering(n: int) -> float:
    """Centering for the total length: log(n)/2 - log(pi/sqrt 6)."""
    return 0.5 * math.log(n) - math.log(math.pi / math.sqrt(6.0))


@dataclass(frozen=True)
class LimitingCdfs:
    """The three limit laws at one argument."""

    H_o: float  # odd-count limit: erfc(e^{-x})
    H_e: float  # even-count limit: exp(-e^{-2x})
    gumbel_length: float  # length limit: exp(-e^{-x})


def limiting_cdfs(x: float) -> LimitingCdfs:
    return LimitingCdfs(
        H_o=float(erfc(math.exp(-x))),
        H_e=math.exp(-math.exp(-2.0 * x)),
        gumbel_length=math.exp(-math.exp(-x)),
    )


# ---------------------------------------------------------------------------
# monotone statistics and the weight-sandwich inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneStatistic:
    """A partition functional that never decreases when parts are added.

    weight_floor, when given, must be a non-decreasing certified lower bound
    for the functional over all partitions of weight m; it lets the infinite
    upper-bound series treat far levels as fully inside the threshold set.
    """

    name: str
    evaluator: Callable[[Partition], float]
    weight_floor: Callable[[int], float] | None = None


STATISTICS: dict[str, MonotoneStatistic] = {
    "all": MonotoneStatistic("all", lambda lam: 0.0, lambda m: 0.0),
    "weight": MonotoneStatistic("weight", lambda lam: lam.weight, lambda m: m),
    "length": MonotoneStatistic("length", lambda lam: lam.length),
    "odd-count": MonotoneStatistic(
        "odd-count", lambda lam: sum(c for k, c in lam.counts.items() if k % 2 == 1)
    ),
    "even-count": MonotoneStatistic(
        "even-count", lambda lam: sum(c for k, c in lam.counts.items() if k % 2 == 0)
    ),
    "ones": MonotoneStatistic("ones", lambda lam: lam.count(1)),
    "max-part": MonotoneStatistic(
        "max-part", lambda lam: lam.parts[0] if lam.parts else 0
    ),
}


def verify_statistic_monotone(stat: MonotoneStatistic, max_weight: int = 10) -> bool:
    """Exhaustively check monotonicity in the growth order on all pairs of
    partitions of weight <= max_weight."""
    pool = [lam for m in range(max_weight + 1) for lam in enumerate_partitions(m)]
    for mu in pool:
        vmu = stat.evaluator(mu)
        for lam in pool:
            if growth_leq(mu, lam) and vmu > stat.evaluator(lam):
                return False
    return True


_MEMBER_CACHE: dict[tuple[str, float, int], int] = {}


def _members(stat: MonotoneStatistic, c: float, m: int) -> int:
    key = (stat.name, c, m)
    if key not in _MEMBER_CACHE:
        _MEMBER_CACHE[key] = sum(
            1 for lam in enumerate_partitions(m, cap=64) if stat.evaluator(lam) >= c
        )
    return _MEMBER_CACHE[key]


@dataclass(frozen=True)
class SandwichCheck:
    """Result of one weight-sandwich verification.

    lhs <= mid is decided in exact rationals; mid <= rhs via the certified
    float interval [rhs_lo, rhs_hi].  For the full set both bounds collapse
    to equalities.
    """

    stat: str
    threshold: float
    n: int
    lhs: float
    mid: float
    rhs_lo: float
    rhs_hi: float
    left_ok: bool
    right_ok: bool
    indeterminate: bool
    left_equality: bool

    @property
    def passed(self) -> bool:
        return self.left_ok and self.right_ok and not self.indeterminate


def _qhat_partial(n: int, h_lo: int, h_hi: int) -> float:
    if h_hi < h_lo:
        return 0.0
    probs = _jump_weight_probs(n, h_hi)
    return float(np.sum(probs[h_lo - 1 :]))


def verify_weight_sandwich(
    stat: MonotoneStatistic, c: float, n: int, enum_cap: int = 44
) -> SandwichCheck:
    """Check the sandwich

      sum_{m<n} q(n,m) M_m(B)  <=  M_n(B)  <=  sum_{m>n} qhat(n,m) M_m(B)

    for the upper set B = {lam : stat(lam) >= c}, with M the uniform measures.

    The left side is finite and evaluated exactly (rationals).  The right side
    is truncated at enum_cap with a certified remainder interval: levels past
    the cap contribute their full jump mass when the statistic's weight_floor
    proves membership, else anywhere between 0 and that mass.
    """
    if n < 1 or n > 18:
        raise ValueError("n must be in 1..18 for exact enumeration")
    if n >= enum_cap:
        raise ValueError("enum_cap must exceed n")
    p_n = partition_count(n)
    mid_exact = Fraction(_members(stat, c, n), p_n)
    lhs_exact = sum(
        (
            forward_weight_prob_exact(n, m)
            * Fraction(_members(stat, c, m), partition_count(m))
            for m in range(n)
        ),
        Fraction(0),
    )
    left_ok = lhs_exact <= mid_exact
    left_equality = lhs_exact == mid_exact

    # full-set shortcut: an upper set containing the empty partition is all of P
    if stat.evaluator(Partition()) >= c:
        H = _full_sum_horizon(n)
        total = _qhat_partial(n, 1, H)
        tail = math.exp(min(log_backward_row_tail_bound(n, H), 700.0))
        slop = 1e-12
        rhs_lo, rhs_hi = total - slop, total + tail + slop
    else:
        # enumerated stretch (n, enum_cap], then the certified remainder
        probs = _jump_weight_probs(n, enum_cap - n)
        body = 0.0
        for m in range(n + 1, enum_cap + 1):
            frac = _members(stat, c, m) / partition_count(m)
            body += probs[m - n - 1] * frac
        floor_covers = (
            stat.weight_floor is not None and stat.weight_floor(enum_cap + 1) >= c
        )
        H = _full_sum_horizon(n)
        rest_mass = _qhat_partial(n, enum_cap - n + 1, H)
        tail = math.exp(min(log_backward_row_tail_bound(n, H), 700.0))
        slop = 1e-12
        if floor_covers:
            rhs_lo = body + rest_mass - slop
            rhs_hi = body + rest_mass + tail + slop
        else:
            rhs_lo = body - slop
            rhs_hi = body + rest_mass + tail + slop

    mid_f = float(mid_exact)
    right_ok = mid_f <= rhs_lo + 1e-10
    indeterminate = (not right_ok) and (mid_f <= rhs_hi + 1e-10)
    return SandwichCheck(
        stat=stat.name,
        threshold=c,
        n=n,
        lhs=float(lhs_exact),
        mid=mid_f,
        rhs_lo=rhs_lo,
        rhs_hi=rhs_hi,
        left_ok=left_ok,
        right_ok=right_ok,
        indeterminate=indeterminate,
        left_equality=left_equality,
    )


def _full_sum_horizon(n: int, log_target: float = math.log(1e-13)) -> int:
    H = 128
    while log_backward_row_tail_bound(n, H) > log_target and H < 1_000_000:
        H *= 2
    return H


# ---------------------------------------------------------------------------
# goodness of fit
# ---------------------------------------------------------------------------

def ks_statistic(samples, cdf: Callable[[float], float]) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a callable CDF."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    m = len(xs)
    if m == 0:
        raise ValueError("need at least one sample")
    F = np.array([cdf(x) for x in xs])
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - F), np.max(F - (i - 1) / m)))


def chi_square(observed, expected_probs) -> tuple[float, float]:
    """Pearson chi-square against given cell probabilities.

    Returns (statistic, p-value); the p-value is the regularized upper
    incomplete gamma at dof/2.
    """
    obs = np.asarray(observed, dtype=np.float64)
    probs = np.asarray(expected_probs, dtype=np.float64)
    if obs.shape != probs.shape or len(obs) < 2:
        raise ValueError("observed and expected must align, with >= 2 cells")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("expected probabilities must sum to 1")
    total = obs.sum()
    exp = probs * total
    if np.any(exp <= 0):
        raise ValueError("each cell needs positive expected count")
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = len(obs) - 1
    return stat, float(gammaincc(dof / 2.0, stat / 2.0))
