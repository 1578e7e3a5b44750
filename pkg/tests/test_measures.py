import math

import numpy as np
import pytest
from scipy.integrate import quad

from partigrowth.counting import partition_count
from partigrowth.logprob import LogProb
from partigrowth.measures import (
    ETA,
    appendix_series_residual,
    backward_normalization_residual,
    backward_weight_logprob,
    divisor_identity_residual,
    euler_product,
    forward_weight_logprob,
    forward_weight_prob_exact,
    gc_log_prob,
    gc_moments,
    growth_profile,
    growth_profile_integral,
    hyperbolic_series_value,
    jump_intensity,
    jump_intensity_divisor_form,
    jump_intensity_tail,
    jump_intensity_tail_divisor_form,
    jump_intensity_tail_inverse,
    limit_shape,
    limit_shape_integral,
    log_level_visit_prob,
    log_partition_gf,
    log_visit_prob,
    mp_visit_prob_after,
    pentagonal_series,
    q_for_weight,
    s_for_weight,
    t_for_weight,
    visit_prob,
    visit_prob_after,
    visit_prob_from_appendix,
    visit_prob_series_accelerated,
    visit_prob_series_paired,
    _log_visit_prob_float,
)
from partigrowth.partitions import EMPTY, enumerate_partitions, from_parts


# ---------------------------------------------------------------------------
# LogProb arithmetic
# ---------------------------------------------------------------------------

def test_logprob_algebra():
    a = LogProb.from_value(0.25)
    b = LogProb.from_value(0.5)
    assert math.isclose((a * b).value, 0.125, rel_tol=1e-14)
    assert math.isclose((a / b).value, 0.5, rel_tol=1e-14)
    assert math.isclose((a + b).value, 0.75, rel_tol=1e-14)
    assert (a**2).value == pytest.approx(0.0625, rel=1e-14)
    z = LogProb.zero()
    assert (z * a).is_zero and (z + a) == a and z < a
    with pytest.raises(ZeroDivisionError):
        a / z
    assert float(LogProb.one()) == 1.0


# ---------------------------------------------------------------------------
# grand canonical measure
# ---------------------------------------------------------------------------

def test_gc_log_prob_empty_is_max_atom():
    q = 0.3
    lp = gc_log_prob(EMPTY, q)
    assert lp.log_value == pytest.approx(-log_partition_gf(q), rel=1e-14)
    # empty partition carries the largest single atom
    assert gc_log_prob(from_parts([1]), q) < lp


def test_gc_ratio_depends_only_on_weight_gap():
    q = 0.77
    lam, mu = from_parts([5, 2, 2]), from_parts([3, 1])
    ratio = gc_log_prob(lam, q).log_value - gc_log_prob(mu, q).log_value
    assert ratio == pytest.approx((9 - 4) * math.log(q), rel=1e-12)


def test_gc_equal_on_levels_and_normalized():
    q = 0.5
    # conditional uniformity: equal log-probabilities on each level
    for n in (3, 6, 10):
        logs = [gc_log_prob(lam, q).log_value for lam in enumerate_partitions(n)]
        assert max(logs) - min(logs) < 1e-13
    # level masses p(n) q^n / P(q) recover 1 when summed far enough
    logP = log_partition_gf(q)
    masses = [
        partition_count(n) * q**n / math.exp(logP) for n in range(0, 200)
    ]
    assert sum(masses) == pytest.approx(1.0, abs=1e-12)
    # and the n <= 15 masses match an exhaustive enumeration of atoms
    for n in range(16):
        atom_sum = sum(
            math.exp(gc_log_prob(lam, q).log_value) for lam in enumerate_partitions(n)
        )
        assert atom_sum == pytest.approx(masses[n], rel=1e-12)


# ---------------------------------------------------------------------------
# intensity f, tail F, inverse
# ---------------------------------------------------------------------------

def test_intensity_large_t_single_term():
    t = 45.0
    assert jump_intensity(t) == pytest.approx(math.exp(-t), rel=1e-12)
    assert jump_intensity_tail(t) == pytest.approx(math.exp(-t), rel=1e-12)


def test_intensity_small_t_asymptotics():
    t = 0.1
    assert jump_intensity(t) == pytest.approx(math.pi**2 / (6 * t * t), rel=0.05)


def test_intensity_divisor_forms_agree():
    for t in (0.25, 0.5, 1.0, 2.0):
        assert jump_intensity(t) == pytest.approx(
            jump_intensity_divisor_form(t), rel=1e-12
        )
        assert jump_intensity_tail(t) == pytest.approx(
            jump_intensity_tail_divisor_form(t), rel=1e-10
        )


def test_tail_inverse_round_trips():
    for s in (0.1, 1.0, 10.0, 1000.0):
        t = jump_intensity_tail_inverse(s)
        assert abs(jump_intensity_tail(t) - s) / s <= 1e-10


def test_tail_inverse_asymptotics():
    s = 1e4
    assert jump_intensity_tail_inverse(s) * 6 * s / math.pi**2 == pytest.approx(
        1.0, abs=2e-3
    )
    n = 10**6
    assert s_for_weight(n) / (math.pi * math.sqrt(n / 6)) == pytest.approx(
        1.0, abs=0.01
    )


# ---------------------------------------------------------------------------
# visit probability
# ---------------------------------------------------------------------------

def test_visit_prob_base_case():
    assert log_visit_prob(0).log_value == 0.0
    assert visit_prob(0) == 1.0


def test_visit_prob_series_oracle_n1():
    # oracle: raw symmetric-pair partial sums of the alternating series,
    # summed independently of the library path with exact accumulation
    n = 1
    js = np.arange(1, 300_001, dtype=np.float64)
    a = n + js * (3 * js + 1) / 2
    b = n + js * (3 * js - 1) / 2
    pairs = ((-1.0) ** js) * (n / a + n / b)
    oracle = math.fsum([1.0] + pairs.tolist())
    assert abs(oracle - visit_prob(1)) <= 1e-10
    # the library's own paired partial sum agrees with the oracle exactly
    assert visit_prob_series_paired(1, 300_000) == pytest.approx(oracle, abs=1e-15)


def test_visit_prob_accelerated_matches_closed_form():
    for n in range(1, 201):
        acc = visit_prob_series_accelerated(n, dps=80)
        cf = visit_prob(n)
        assert abs(acc - cf) / cf <= 1e-9


def test_visit_prob_large_n_asymptotics():
    n = 10**4
    ratio = math.exp(
        _log_visit_prob_float(n)
        - (math.log(math.pi * math.sqrt(2 * n)) - math.pi * math.sqrt(2 * n / 3))
    )
    assert ratio == pytest.approx(1.0, abs=0.02)


def test_visit_prob_after_quadrature_oracle():
    # oracle: n * integral_tau^inf e^{-nt} prod_j (1 - e^{-jt}) dt
    n, tau = 1, 1.0

    def integrand(t):
        prod = 1.0
        j = 1
        while j * t < 60.0:
            prod *= 1.0 - math.exp(-j * t)
            j += 1
        return n * math.exp(-n * t) * prod

    oracle, err = quad(integrand, tau, 60.0, limit=300, epsabs=1e-13)
    got = visit_prob_after(n, tau).value
    assert abs(got - oracle) <= 1e-8 + 10 * err


def test_visit_prob_after_limits():
    # tau -> 0 recovers the full visit probability (high-precision path)
    for n in (1, 5, 20, 50):
        v = mp_visit_prob_after(n, 1e-6, dps=60)
        assert abs(v - visit_prob(n)) / visit_prob(n) <= 1e-8
    # tau -> infinity kills every term
    assert visit_prob_after(3, 50.0).value < 1e-60


def test_level_visit_prob():
    assert log_level_visit_prob(0) == LogProb.one()
    n = 10**4
    gamma = math.exp(log_level_visit_prob(n).log_value)
    assert gamma * 2 * math.sqrt(6 * n) / math.pi == pytest.approx(1.0, abs=0.03)
    for m in range(1, 10**4, 37):
        assert log_level_visit_prob(m).log_value <= 1e-12


# ---------------------------------------------------------------------------
# one-step weight laws
# ---------------------------------------------------------------------------

def test_forward_weight_law_small():
    assert forward_weight_logprob(2, 0).value == pytest.approx(0.75, rel=1e-12)
    assert forward_weight_logprob(2, 1).value == pytest.approx(0.25, rel=1e-12)
    assert forward_weight_logprob(1, 0).value == pytest.approx(1.0, rel=1e-12)


def test_forward_weight_rows_sum_to_one_exactly():
    from fractions import Fraction

    for n in range(1, 201):
        assert sum(forward_weight_prob_exact(n, m) for m in range(n)) == Fraction(1)


def test_backward_weight_law_from_empty():
    for h in (1, 2, 5):
        expect = visit_prob(h) * sum(d for d in range(1, h + 1) if h % d == 0) / h
        assert backward_weight_logprob(0, h).value == pytest.approx(expect, rel=1e-12)


def test_backward_rows_normalize():
    # deficiency below 1e-9 for a weight grid; the documented truncation is
    # max(200, n + 40 sqrt(n+1)): the square-root rule alone leaves ~2e-5 of
    # mass at n <= 1, where the jump law has a heavy small-weight tail
    for n in (0, 1, 10, 100, 500):
        H = max(200, n + int(40 * math.sqrt(n + 1)) + 1)
        total = sum(backward_weight_logprob(n, h).value for h in range(1, H + 1))
        assert abs(total - 1.0) < 1e-9


def test_reversal_identity():
    # gamma(n) q(n,m) = gamma(m) qhat(m, n-m) across all 0 <= m < n <= 100
    for n in range(1, 101):
        ln = log_level_visit_prob(n).log_value
        for m in range(n):
            left = ln + forward_weight_logprob(n, m).log_value
            right = (
                log_level_visit_prob(m).log_value
                + backward_weight_logprob(m, n - m).log_value
            )
            assert abs(left - right) <= 1e-12 * max(1.0, abs(left))


# ---------------------------------------------------------------------------
# divisor identities with certified truncation
# ---------------------------------------------------------------------------

def test_identities_double_precision():
    for n in (0, 1, 7, 50, 100):
        c16 = backward_normalization_residual(n)
        c19 = divisor_identity_residual(n)
        assert c16.passed and c16.residual <= 1e-9
        assert c19.passed and c19.residual <= 1e-9
        assert c16.tail_bound <= 1e-9
        assert c19.tail_bound <= 1e-9


def test_identities_high_precision():
    for n in (0, 1, 50):
        assert backward_normalization_residual(n, dps=50).residual <= 1e-12
        assert divisor_identity_residual(n, dps=50).residual <= 1e-12


# ---------------------------------------------------------------------------
# residue series
# ---------------------------------------------------------------------------

def test_appendix_residuals():
    for x in (math.sqrt(23.0), 5.0, 20.0):
        assert appendix_series_residual(x, 10**4) <= 1e-8
    assert appendix_series_residual(5.0, 2000) <= appendix_series_residual(5.0, 200)


def test_appendix_reproduces_visit_prob():
    for n in (1, 5, 20):
        v = visit_prob_from_appendix(n)
        assert abs(math.log(v) - _log_visit_prob_float(n)) <= 1e-8


def test_appendix_closed_form_value():
    # independent check of the hyperbolic closed form at x = sqrt(23):
    # scaling by 24/x must reproduce the weight-1 visit probability
    x = math.sqrt(23.0)
    assert 24.0 / x * hyperbolic_series_value(x) == pytest.approx(
        visit_prob(1), rel=1e-12
    )


# ---------------------------------------------------------------------------
# pentagonal product
# ---------------------------------------------------------------------------

def test_pentagonal_product_matches_series():
    for q in (0.1, 0.5, 0.9):
        assert abs(euler_product(q) - pentagonal_series(q)) <= 1e-12


# ---------------------------------------------------------------------------
# limit shape and growth profile
# ---------------------------------------------------------------------------

def test_limit_shape_symmetry_point():
    x_star = math.sqrt(6.0) * math.log(2.0) / math.pi
    assert limit_shape(x_star) == pytest.approx(x_star, abs=1e-14)


def test_growth_profile_integral_quadrature_oracle():
    # oracle: adaptive quadrature of the profile itself (the library path is
    # a dilogarithm closed form); split at 1 to keep the log endpoint tame
    v1, e1 = quad(growth_profile, 1e-10, 1.0, limit=400)
    v2, e2 = quad(growth_profile, 1.0, 60.0, limit=400)
    assert abs(v1 + v2 - ETA) <= 1e-8 + 10 * (e1 + e2)
    assert float(growth_profile_integral(0.0, 60.0)) == pytest.approx(ETA, abs=1e-12)
    a, b = 0.2, 1.7
    piece, err = quad(growth_profile, a, b, limit=200)
    assert float(growth_profile_integral(a, b)) == pytest.approx(piece, abs=1e-10)


def test_limit_shape_unit_area():
    assert float(limit_shape_integral(0.0, 80.0)) == pytest.approx(1.0, abs=1e-12)


def test_shape_ode():
    for x in (0.3, 1.0, 3.0):
        e = 1e-6
        yp = (limit_shape(x + e) - limit_shape(x - e)) / (2 * e)
        resid = growth_profile(x) + ETA / 2 * x * yp - ETA / 2 * limit_shape(x)
        assert abs(resid) <= 1e-8


# ---------------------------------------------------------------------------
# weight moments
# ---------------------------------------------------------------------------

def test_gc_moments_large_n():
    n = 10**6
    mean, var = gc_moments(n)
    assert abs(mean - n) / n**0.75 <= 1.0
    assert var / ((2 * math.sqrt(6) / math.pi) * n**1.5) == pytest.approx(1.0, abs=0.01)
    assert mean == jump_intensity(t_for_weight(n))  # literally the same series


def test_t_q_s_for_weight():
    n = 100
    assert q_for_weight(n) == math.exp(-t_for_weight(n))
    assert jump_intensity_tail(t_for_weight(n)) == pytest.approx(
        s_for_weight(n), rel=1e-12
    )


def test_local_limit_spot_check():
    # sqrt(Var) * P[weight = n] approaches 1/sqrt(2 pi) at the tuned
    # parameter; Monte Carlo with one million independent weight draws
    from partigrowth import _kernels
    from partigrowth.rng import RngStream

    n = 2 * 10**4
    t = t_for_weight(n)
    kmax = 1
    while math.exp(-t * (kmax + 1)) / (1 - math.exp(-t)) >= 1e-12:
        kmax += 1
    q_pow = np.exp(-t * np.arange(kmax + 1, dtype=np.float64))
    w = _kernels.gc_weight_batch(t, q_pow, RngStream(2020, 0).replica_keys(10**6))
    p_hat = float((w == n).mean())
    mean, var = gc_moments(n)
    assert abs(p_hat * math.sqrt(var) / (1 / math.sqrt(2 * math.pi)) - 1) <= 0.10
    # the point-mass asymptotic (96 n^3)^{-1/4} is the same statement
    assert abs(p_hat / (96 * n**3) ** -0.25 - 1) <= 0.10
