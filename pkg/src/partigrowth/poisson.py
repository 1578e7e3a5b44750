"""Marked Poisson point process representation of the growth process.

In the original clock the jump times form a Poisson process with intensity
density f(t); rescaling time by s = F(t) (the intensity tail) turns the jump
times into a standard unit-rate Poisson process whose points carry independent
(width, rows) rectangle marks.  Reconstructing part counts from the marks
reproduces the growing partition process in the new clock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counting import sigma1
from .measures import jump_intensity, jump_intensity_tail_inverse
from .partitions import Partition, add_run
from .rng import RngStream

__all__ = [
    "MarkedPoint",
    "mark_law",
    "mark_weight_law",
    "sample_trajectory",
    "partition_at",
    "mark_width_samples",
    "limiting_mark_cdf",
    "limiting_r_given_k",
]


@dataclass(frozen=True)
class MarkedPoint:
    """One arrival of the standard-clock growth process.

    s is the unit-rate clock time, t = F^{-1}(s) the original clock time, and
    (k, r) the attached rectangle mark: r new parts of size k.
    """

    s: float
    t: float
    k: int
    r: int


def mark_law(s: float, k: int, r: int) -> float:
    """Joint mark probability at clock time s: k e^{-t k r} / f(t), t = F^{-1}(s)."""
    if s <= 0:
        raise ValueError("s must be > 0")
    if k < 1 or r < 1:
        raise ValueError("k and r must be >= 1")
    t = jump_intensity_tail_inverse(s)
    return k * math.exp(-t * k * r) / jump_intensity(t)


def mark_weight_law(s: float, h: int) -> float:
    """Probability that the mark adds h boxes: sigma_1(h) e^{-th} / f(t)."""
    if h < 1:
        raise ValueError("h must be >= 1")
    t = jump_intensity_tail_inverse(s)
    return sigma1(h) * math.exp(-t * h) / jump_intensity(t)


def _width_table(t: float, miss: float = 1e-13) -> np.ndarray:
    # P[width = k] proportional to k e^{-tk}/(1-e^{-tk}); truncation certified
    # by the geometric tail of k e^{-tk}
    kmax = int((math.log(1.0 / miss) + 2.0 * math.log(1.0 / t) + 5.0) / t) + 1
    k = np.arange(1, kmax + 1, dtype=np.float64)
    x = np.exp(-k * t)
    w = k * x / (1.0 - x)
    return w / jump_intensity(t)


def _sample_mark(t: float, rng: RngStream) -> tuple[int, int]:
    # width by inversion over the per-size intensity share, rows geometric;
    # a draw beyond the float-converged cumulative lands on the last width
    u = float(rng.gen.random())
    cum = 0.0
    f = jump_intensity(t)
    k = 0
    while cum < u and cum < 1.0 - 1e-12:
        k += 1
        x = math.exp(-k * t)
        cum += k * x / (1.0 - x) / f
        if k > 100_000_000:
            raise RuntimeError("mark width inversion ran away")
    k = max(k, 1)
    r = int(rng.gen.geometric(p=1.0 - math.exp(-k * t)))
    return k, r


def sample_trajectory(s_max: float, rng: RngStream) -> list[MarkedPoint]:
    """Unit-rate arrivals on (0, s_max], each with an independent mark drawn
    at its own arrival time.  Returned in increasing s."""
    if s_max <= 0:
        raise ValueError("s_max must be > 0")
    count = int(rng.gen.poisson(s_max))
    times = np.sort(rng.gen.uniform(0.0, s_max, size=count))
    points = []
    t_prev = None
    for s in times:
        t = jump_intensity_tail_inverse(float(s), t0=t_prev)
        t_prev = t
        k, r = _sample_mark(t, rng)
        points.append(MarkedPoint(float(s), t, k, r))
    return points


def partition_at(points: list[MarkedPoint], s: float) -> Partition:
    """State of the growth process at clock time s: accumulate the marks of
    all arrivals up to s as part counts."""
    lam = Partition()
    for p in points:
        if p.s <= s:
            lam = add_run(lam, p.k, p.r)
    return lam


def mark_width_samples(s: float, size: int, rng: RngStream) -> np.ndarray:
    """Widths of `size` independent marks at fixed clock time s (vectorized
    table inversion; used for the scaled-mark limit law checks)."""
    t = jump_intensity_tail_inverse(s)
    w = _width_table(t)
    cdf = np.cumsum(w)
    u = rng.gen.random(size)
    return np.searchsorted(cdf, u) + 1


def limiting_mark_cdf(x: float) -> float:
    """Limit distribution of width/s as s grows:
    (pi^2/6) integral_0^x y e^{-cy}/(1-e^{-cy}) dy with c = pi^2/6.

    Exact dilogarithm form of the integral, so small and large x are equally
    cheap: c G(x) = (1 - (6/pi^2) Li2(e^{-cx})) + x log(1-e^{-cx}).
    """
    if x <= 0:
        return 0.0
    from scipy.special import spence

    c = math.pi**2 / 6.0
    e = math.exp(-c * x)
    li2 = float(spence(1.0 - e))  # Li_2(e^{-cx})
    return 1.0 - li2 / c + x * math.log1p(-e)


def limiting_r_given_k(x: float, r: int) -> float:
    """Limit conditional law of the row count given scaled width x: geometric
    with success probability 1 - e^{-pi^2 x / 6}."""
    if x <= 0:
        raise ValueError("x must be > 0")
    if r < 1:
        raise ValueError("r must be >= 1")
    p = 1.0 - math.exp(-math.pi**2 * x / 6.0)
    return p * math.exp(-math.pi**2 * x * (r - 1) / 6.0)
