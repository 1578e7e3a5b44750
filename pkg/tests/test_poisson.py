import math
from collections import Counter

import numpy as np
import pytest
from scipy.integrate import quad

from partigrowth.analysis import chi_square, ks_statistic
from partigrowth.chains import rect_width_limit_cdf
from partigrowth.counting import sigma1
from partigrowth.measures import (
    gc_log_prob,
    jump_intensity,
    jump_intensity_tail,
    jump_intensity_tail_inverse,
)
from partigrowth.partitions import Partition, add_run
from partigrowth.poisson import (
    limiting_mark_cdf,
    limiting_r_given_k,
    mark_law,
    mark_weight_law,
    mark_width_samples,
    partition_at,
    sample_trajectory,
)
from partigrowth.rng import RngStream


def test_mark_law_normalizes():
    for s in (1.0, 10.0, 100.0):
        t = jump_intensity_tail_inverse(s)
        f = jump_intensity(t)
        kmax = int(80.0 / t) + 10
        k = np.arange(1, kmax + 1, dtype=np.float64)
        x = np.exp(-k * t)
        total = float((k * x / (1.0 - x)).sum() / f)
        assert total == pytest.approx(1.0, abs=1e-10)
        # spot agreement between mark_law and the r-summed geometric row
        rmax = int(45.0 / (2 * t)) + 5
        assert sum(mark_law(s, 2, r) for r in range(1, rmax)) == pytest.approx(
            2 * math.exp(-2 * t) / (1 - math.exp(-2 * t)) / f, rel=1e-10
        )


def test_mark_weight_marginal_is_divisor_sum():
    s = 7.0
    for h in (1, 2, 6, 12):
        joint = sum(mark_law(s, k, h // k) for k in range(1, h + 1) if h % k == 0)
        assert mark_weight_law(s, h) == pytest.approx(joint, rel=1e-12)
        t = jump_intensity_tail_inverse(s)
        assert mark_weight_law(s, h) == pytest.approx(
            sigma1(h) * math.exp(-t * h) / jump_intensity(t), rel=1e-12
        )


def test_mark_law_large_s_scaling():
    # at large s the joint law approaches (pi^2/6)(k/s^2) e^{-pi^2 kr/(6s)}
    s = 2000.0
    for k, r in ((1, 1), (300, 2), (1500, 1)):
        got = mark_law(s, k, r)
        approx = (math.pi**2 / 6.0) * k / s**2 * math.exp(
            -(math.pi**2 / 6.0) * k * r / s
        )
        assert got == pytest.approx(approx, rel=5 * math.log(s) / s)


def test_trajectory_arrival_counts_poisson():
    s_max = 50.0
    counts = [len(sample_trajectory(s_max, RngStream(21, i))) for i in range(1000)]
    counts = np.asarray(counts, dtype=float)
    se_mean = math.sqrt(s_max / len(counts))
    assert abs(counts.mean() - s_max) <= 3 * se_mean
    se_var = math.sqrt((s_max + 2 * s_max**2) / len(counts))
    assert abs(counts.var() - s_max) <= 3 * se_var


def test_trajectory_times_increase_and_t_inverts():
    pts = sample_trajectory(40.0, RngStream(4, 4))
    ss = [p.s for p in pts]
    assert ss == sorted(ss)
    for p in pts[:10]:
        assert jump_intensity_tail(p.t) == pytest.approx(p.s, rel=1e-8)
    ts = [p.t for p in pts]
    assert ts == sorted(ts, reverse=True)  # growing s means shrinking t


def test_reconstruction_matches_rectangle_insertion():
    pts = sample_trajectory(25.0, RngStream(6, 1))
    lam = Partition()
    for p in pts:
        lam = add_run(lam, p.k, p.r)
        assert partition_at(pts, p.s) == lam
    # independent accumulation by raw counts
    counts: Counter = Counter()
    for p in pts:
        counts[p.k] += p.r
    rebuilt = Partition([k for k, c in counts.items() for _ in range(c)])
    assert rebuilt == partition_at(pts, 25.0)


def test_state_at_fixed_s_has_gc_distribution():
    # the growth state at clock time s carries the grand canonical law at
    # q = exp(-F^{-1}(s)); chi-square against the exact atom probabilities
    s = 3.0
    q = math.exp(-jump_intensity_tail_inverse(s))
    draws = Counter()
    n_runs = 4000
    for i in range(n_runs):
        lam = partition_at(sample_trajectory(s, RngStream(33, i)), s)
        draws[lam] += 1
    # cells: the most likely partitions by exact probability, plus "other"
    pool = sorted(draws, key=lambda lam: -math.exp(gc_log_prob(lam, q).log_value))
    cells = [lam for lam in pool if math.exp(gc_log_prob(lam, q).log_value) * n_runs >= 10][:25]
    probs = np.array([math.exp(gc_log_prob(lam, q).log_value) for lam in cells])
    obs = np.array([draws.get(lam, 0) for lam in cells], dtype=float)
    obs = np.append(obs, n_runs - obs.sum())
    probs = np.append(probs, 1.0 - probs.sum())
    stat, p = chi_square(obs, probs)
    assert p > 0.001


def test_arrival_time_change_matches_intensity():
    # pushing arrival s-times through F^{-1} must reproduce the density f on
    # the original axis: counts in t-bins over (0.05, 1] vs integrals of f;
    # bins chosen so every expected count clears ~4000 (3 sigma inside 5%)
    t_edges = np.array([0.05, 0.1, 0.2, 0.45, 1.0])
    s_max = jump_intensity_tail(0.05)
    runs = 2500
    counts = np.zeros(len(t_edges) - 1)
    for i in range(runs):
        pts = sample_trajectory(s_max, RngStream(55, i))
        ts = np.array([p.t for p in pts])
        counts += np.histogram(ts, bins=t_edges)[0]
    expected = runs * np.array(
        [
            jump_intensity_tail(t_edges[i]) - jump_intensity_tail(t_edges[i + 1])
            for i in range(len(t_edges) - 1)
        ]
    )
    assert np.all(np.abs(counts - expected) <= 0.05 * expected)


def test_limiting_mark_cdf_quadrature_oracle():
    # oracle: adaptive quadrature of the stated density
    c = math.pi**2 / 6.0
    for x in (0.3, 1.0, 2.0):
        val, err = quad(lambda y: c * y * math.exp(-c * y) / (1 - math.exp(-c * y)), 1e-12, x)
        assert limiting_mark_cdf(x) == pytest.approx(val, abs=1e-10 + 10 * err)
    assert limiting_mark_cdf(50.0) == pytest.approx(1.0, abs=1e-8)


def test_limiting_mark_cdf_consistent_with_rect_limit():
    # the two limit laws differ by the sqrt(6)/pi change of scale
    for x in (0.2, 0.7, 1.3, 2.5):
        assert limiting_mark_cdf(x) == pytest.approx(
            rect_width_limit_cdf(math.pi * x / math.sqrt(6.0)), rel=1e-12
        )


def test_limiting_rows_given_width_normalizes():
    for x in (0.2, 1.0, 3.0):
        total = sum(limiting_r_given_k(x, r) for r in range(1, 2000))
        assert total == pytest.approx(1.0, abs=1e-9)


def test_mark_width_sampling_ks():
    widths = mark_width_samples(1e4, 10**5, RngStream(12, 0))
    d = ks_statistic(widths / 1e4, limiting_mark_cdf)
    assert d <= 0.02


def test_trajectory_weight_concentrates():
    # weight at the tuned clock time stays within u n^{3/4} of n
    import partigrowth.measures as M

    n = 10**4
    s_n = M.s_for_weight(n)
    bad = 0
    runs = 400
    for i in range(runs):
        pts = sample_trajectory(s_n, RngStream(77, i))
        w = sum(p.k * p.r for p in pts)
        if abs(w - n) > 10 * n**0.75:
            bad += 1
    assert bad / runs <= 0.01
