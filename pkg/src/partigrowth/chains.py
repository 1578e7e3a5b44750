"""Simulators and exact solvers for the partition growth chains.

Three related processes live here:

* the continuous-time shrinking chain (rate = weight; a jump removes a run of
  equal parts), simulated by Gillespie embedding;
* its discrete forward jump chain (uniform box choice);
* the time-reversed growing chain, which inserts k x r rectangles with the
  explicit weight/visit-probability law and is the object whose level-hit
  conditional distribution is uniform.

Also: exact visit-probability dynamic programming over all partitions up to a
weight cap, uniform-partition samplers (plain rejection, and an exact
divide-and-conquer variant that is hundreds of times cheaper at large n), and
deterministic sums for the rectangle-mark moments and marginals.

Replica-heavy entry points delegate to compiled kernels in _kernels; the
per-step Python implementations below define the law and double as the
reference path for tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .counting import sigma1, sigma1_sieve
from .measures import (
    _log_visit_prob_float,
    _mp_log_visit_prob,
    log_backward_row_tail_bound,
    q_for_weight,
    t_for_weight,
)
from .partitions import EMPTY, Partition, add_run, enumerate_partitions, remove_run
from .rng import RngStream

__all__ = [
    "ChainStep",
    "Trajectory",
    "sample_gc_partition",
    "gc_part_count_arrays",
    "forward_jump",
    "gillespie_forward",
    "backward_jump",
    "backward_jump_weight",
    "run_backward_until",
    "backward_hit_stats",
    "visit_probability_table",
    "sample_uniform_rejection",
    "rejection_attempt_stats",
    "sample_uniform_partition",
    "uniform_counts_batch",
    "expected_rect_moments",
    "rect_width_cdf",
    "rect_width_limit_cdf",
    "conditional_rows_given_width",
    "HORIZON_HARD_CAP",
]

# a jump this far past the current weight means the float inversion broke
HORIZON_HARD_CAP = 1_000_000


@dataclass(frozen=True)
class ChainStep:
    """One transition: a k x r rectangle removed (forward) or inserted (backward)."""

    before: Partition
    after: Partition
    rect_k: int
    rect_r: int
    direction: str  # "forward-removal" | "backward-insertion"

    def __post_init__(self):
        dw = self.after.weight - self.before.weight
        want = self.rect_k * self.rect_r
        if abs(dw) != want:
            raise ValueError(f"step weight change {dw} != k*r = {want}")


@dataclass
class Trajectory:
    """An ordered run of chain steps, optionally with continuous timestamps."""

    steps: list[ChainStep] = field(default_factory=list)
    times: list[float] | None = None
    seed: int = 0
    stream: int = 0

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> Partition:
        return self.steps[-1].after if self.steps else EMPTY

    def weights(self) -> list[int]:
        out = [self.steps[0].before.weight] if self.steps else []
        out += [s.after.weight for s in self.steps]
        return out


# ---------------------------------------------------------------------------
# grand canonical sampling
# ---------------------------------------------------------------------------

def _kmax_for_q(q: float, miss_prob: float = 1e-12) -> int:
    # smallest K with P[some part larger than K] <= q^{K+1}/(1-q) < miss_prob
    t = -math.log(q)
    k = max(1, int((math.log(1.0 / miss_prob) - math.log1p(-q)) / t))
    while q ** (k + 1) / (1.0 - q) >= miss_prob:
        k += 1
    return k


def gc_part_count_arrays(q: float, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Geometric part counts (sizes 1..kmax) of one grand-canonical draw."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0,1)")
    kmax = _kmax_for_q(q)
    ks = np.arange(1, kmax + 1)
    counts = rng.gen.geometric(p=1.0 - q**ks.astype(np.float64)) - 1
    return ks, counts


def sample_gc_partition(q: float, rng: RngStream) -> Partition:
    """One draw from the grand canonical measure at parameter q.

    Part counts are independent geometrics; sizes beyond the truncation order
    appear with probability < 1e-12 and are treated as absent.
    """
    ks, counts = gc_part_count_arrays(q, rng)
    parts: list[int] = []
    for k, c in zip(ks[counts > 0], counts[counts > 0]):
        parts.extend([int(k)] * int(c))
    return Partition(parts)


# ---------------------------------------------------------------------------
# forward (shrinking) chain
# ---------------------------------------------------------------------------

def forward_jump(lam: Partition, rng: RngStream) -> ChainStep:
    """One removal step: choose a box uniformly, drop its row and all equal
    rows below it.  Removing r parts of size k this way has probability k/n
    for every admissible (k, r)."""
    n = lam.weight
    if n == 0:
        raise ValueError("the empty partition is absorbing")
    box = int(rng.gen.integers(n))
    acc = 0
    for idx, p in enumerate(lam.parts):
        acc += p
        if box < acc:
            k = p
            # rows of size k below and including row idx
            same_after = sum(1 for pp in lam.parts[idx:] if pp == k)
            mu = remove_run(lam, k, same_after)
            return ChainStep(lam, mu, k, same_after, "forward-removal")
    raise AssertionError("box index out of range")


def gillespie_forward(lam0: Partition, tau: float, rng: RngStream) -> Trajectory:
    """Continuous-time run from state lam0 at time tau until absorption at the
    empty partition: hold Exp(weight), then jump with the forward law."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    traj = Trajectory(times=[], seed=rng.seed, stream=rng.stream)
    lam = lam0
    t = tau
    while lam.weight > 0:
        t += rng.gen.exponential(1.0 / lam.weight)
        step = forward_jump(lam, rng)
        traj.steps.append(step)
        traj.times.append(t)
        lam = step.after
    return traj


# ---------------------------------------------------------------------------
# backward (growing) chain
# ---------------------------------------------------------------------------

_CUM_ROW_CACHE: dict[int, np.ndarray] = {}


def _cum_jump_row(n: int) -> np.ndarray:
    """Cumulative jump-size law at weight n (cached for small weights).

    The cumulative sums match the sequential loop exactly (same summation
    order), so both inversion paths draw identical jump sizes from the same
    uniform."""
    row = _CUM_ROW_CACHE.get(n)
    if row is None:
        H = _jump_weight_horizon(n)
        row = np.cumsum(_jump_weight_probs(n, H))
        _CUM_ROW_CACHE[n] = row
    return row


def backward_jump_weight(n: int, rng: RngStream) -> int:
    """Jump size h of the growing weight chain at weight n.

    Cumulative inversion in increasing h against the exact law
    g(n+h) sigma_1(h) / ((n+h) g(n)); the horizon extends on demand and is
    never renormalized.  A jump past n + HORIZON_HARD_CAP raises.
    """
    u = float(rng.gen.random())
    if u == 0.0:
        u = 1e-300
    if n <= 4096:
        row = _cum_jump_row(n)
        h = int(np.searchsorted(row, u)) + 1
        if h <= len(row):
            return h
        if row[-1] >= 1.0 - 1e-12:
            # the horizon already holds all mass up to 1 - 1e-12; a draw in
            # the residual sliver lands on the last covered jump size
            return len(row)
    lg_n = _log_visit_prob_float(n)
    cum = 0.0
    h = 0
    while cum < u and cum < 1.0 - 1e-12:
        h += 1
        if h > HORIZON_HARD_CAP:
            raise RuntimeError(
                f"jump-size inversion exhausted the horizon at weight {n}"
            )
        cum += math.exp(
            _log_visit_prob_float(n + h) + math.log(sigma1(h)) - math.log(n + h) - lg_n
        )
    return h


from functools import lru_cache


@lru_cache(maxsize=65536)
def _divisors(h: int) -> tuple[int, ...]:
    return tuple(d for d in range(1, h + 1) if h % d == 0)


def _divisor_split(h: int, rng: RngStream) -> tuple[int, int]:
    # width k | h with probability k / sigma_1(h); rows r = h / k
    divs = _divisors(h)
    tot = sum(divs)
    u = float(rng.gen.random()) * tot
    acc = 0
    for d in divs:
        acc += d
        if u < acc:
            return d, h // d
    return divs[-1], 1


def backward_jump(mu: Partition, rng: RngStream) -> ChainStep:
    """One insertion step of the growing chain from mu (defined at the empty
    partition too): sample the jump weight h, then split h = k * r with the
    divisor law, and insert the k x r rectangle."""
    n = mu.weight
    h = backward_jump_weight(n, rng)
    k, r = _divisor_split(h, rng)
    lam = add_run(mu, k, r)
    return ChainStep(mu, lam, k, r, "backward-insertion")


def run_backward_until(n_target: int, rng: RngStream) -> tuple[Trajectory, bool]:
    """Grow from the empty partition until the weight reaches or jumps over
    n_target; hit is True iff some state had weight exactly n_target."""
    if n_target < 1:
        raise ValueError("n_target must be >= 1")
    traj = Trajectory(seed=rng.seed, stream=rng.stream)
    lam = EMPTY
    while lam.weight < n_target:
        step = backward_jump(lam, rng)
        traj.steps.append(step)
        lam = step.after
    return traj, lam.weight == n_target


_LOG_SIGMA_CACHE: dict[int, np.ndarray] = {}


def _log_sigma_table(hmax: int) -> np.ndarray:
    tab = _LOG_SIGMA_CACHE.get(hmax)
    if tab is None:
        sig = sigma1_sieve(hmax).astype(np.float64)
        tab = np.full(hmax + 1, -np.inf)
        tab[1:] = np.log(sig[1:])
        _LOG_SIGMA_CACHE[hmax] = tab
    return tab


def backward_hit_stats(n_target: int, replicas: int, rng: RngStream) -> dict:
    """Replica-parallel weight-chain runs to level n_target (compiled path).

    Returns hit counts plus the per-replica final weights and step counts.
    The weight chain alone decides hits, so partitions are not materialized.
    """
    keys = rng.replica_keys(replicas)
    hmax = min(HORIZON_HARD_CAP, max(200_000, 60 * int(math.sqrt(n_target)) + 1000))
    log_sig = _log_sigma_table(hmax)
    hits, finals, steps, fault = _kernels.backward_hit_runs(
        n_target, keys, log_sig, HORIZON_HARD_CAP
    )
    if fault.any():
        raise RuntimeError("jump-size inversion exhausted the horizon (kernel)")
    return {
        "replicas": replicas,
        "hits": int(hits.sum()),
        "hit_rate": float(hits.mean()),
        "finals": finals,
        "steps": steps,
    }


# ---------------------------------------------------------------------------
# exact visit-probability dynamic programming
# ---------------------------------------------------------------------------

def visit_probability_table(n_max: int, dps: int | None = None) -> dict[Partition, float]:
    """Exact chain-visit probability of every partition of weight <= n_max.

    v(empty) = 1 and v(lam) accumulates over all predecessors mu obtained by
    deleting a run, weighted by the insertion law k g(n)/(n g(m)).  The load-
    bearing claim checked downstream: v depends only on the weight, which is
    exactly the conditional-uniformity property of the growth chain.
    """
    if n_max > 30:
        raise ValueError("state space beyond weight 30 is too large for the DP")
    if dps is None:
        gv = _log_visit_prob_float
        table: dict[Partition, float] = {EMPTY: 1.0}
        for n in range(1, n_max + 1):
            for lam in enumerate_partitions(n):
                acc = 0.0
                for k in lam.counts:
                    for r in range(1, lam.count(k) + 1):
                        mu = remove_run(lam, k, r)
                        m = n - k * r
                        w = k * math.exp(gv(n) - gv(m)) / n
                        acc += table[mu] * w
                table[lam] = acc
        return table
    import mpmath

    with mpmath.workdps(dps):
        tbl: dict[Partition, object] = {EMPTY: mpmath.mpf(1)}
        for n in range(1, n_max + 1):
            for lam in enumerate_partitions(n):
                acc = mpmath.mpf(0)
                for k in lam.counts:
                    for r in range(1, lam.count(k) + 1):
                        mu = remove_run(lam, k, r)
                        m = n - k * r
                        w = k * mpmath.exp(_mp_log_visit_prob(n) - _mp_log_visit_prob(m)) / n
                        acc += tbl[mu] * w
                tbl[lam] = acc
        return {lam: float(v) for lam, v in tbl.items()}


# ---------------------------------------------------------------------------
# uniform sampling
# ---------------------------------------------------------------------------

def sample_uniform_rejection(n: int, rng: RngStream) -> tuple[Partition, int]:
    """Uniform partition of n by plain rejection from the tuned grand
    canonical measure; returns (partition, attempts including the accept)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = q_for_weight(n)
    attempts = 0
    while True:
        attempts += 1
        lam = sample_gc_partition(q, rng)
        if lam.weight == n:
            return lam, attempts


def rejection_attempt_stats(n: int, acceptances: int, rng: RngStream) -> np.ndarray:
    """Attempt counts of plain rejection, one entry per acceptance (compiled)."""
    t = t_for_weight(n)
    kmax = _kmax_for_q(math.exp(-t))
    q_pow = np.exp(-t * np.arange(kmax + 1, dtype=np.float64))
    keys = rng.replica_keys(acceptances)
    return _kernels.rejection_attempt_counts(n, t, q_pow, keys)


def uniform_counts_batch(n: int, samples: int, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Exactly uniform partitions of n, returned as part-count rows.

    Divide-and-conquer rejection: counts of sizes >= 2 come from the grand
    canonical measure, the count of 1s absorbs the residue, and a q^{residue}
    accept step makes every partition of n equally likely.  Hundreds of times
    fewer attempts than plain rejection at n ~ 10^6.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t = t_for_weight(n)
    kmax = _kmax_for_q(math.exp(-t))
    q_pow = np.exp(-t * np.arange(kmax + 1, dtype=np.float64))
    keys = rng.replica_keys(samples)
    counts = np.zeros((samples, kmax + 1), dtype=np.int32)
    attempts = _kernels.pdc_uniform_batch(n, t, q_pow, keys, counts)
    return counts, attempts


def sample_uniform_partition(n: int, rng: RngStream) -> Partition:
    """One exactly uniform partition of n (divide-and-conquer rejection)."""
    counts, _ = uniform_counts_batch(n, 1, rng.child(int(rng.gen.integers(2**62))))
    row = counts[0]
    parts: list[int] = []
    for k in np.nonzero(row)[0]:
        parts.extend([int(k)] * int(row[k]))
    return Partition(parts)


# ---------------------------------------------------------------------------
# deterministic rectangle-mark sums
# ---------------------------------------------------------------------------

def _log_visit_np(m: np.ndarray) -> np.ndarray:
    w = 24.0 * m - 1.0
    A = (math.pi / 6.0) * np.sqrt(w)
    log_sinh = A - math.log(2.0) + np.log1p(-np.exp(-2.0 * A))
    log_den = 2.0 * A + np.log1p(np.exp(-4.0 * A) - np.exp(-2.0 * A))
    return np.log(8.0 * math.sqrt(3.0) * math.pi * m) - 0.5 * np.log(w) + log_sinh - log_den


def _jump_weight_horizon(n: int, nu: int = 0, tol: float = 1e-13) -> int:
    H = max(256, 8 * int(math.sqrt(n + 1)))
    log_tol = math.log(tol)
    while log_backward_row_tail_bound(n, H, nu) > log_tol and H < HORIZON_HARD_CAP:
        H *= 2
    return H


def _jump_weight_probs(n: int, H: int) -> np.ndarray:
    """Vector of jump-size probabilities h = 1..H at weight n (log-space eval)."""
    h = np.arange(1, H + 1, dtype=np.float64)
    sig = sigma1_sieve(H).astype(np.float64)[1:]
    lg = _log_visit_np(n + h) + np.log(sig) - np.log(n + h) - _log_visit_prob_float(n)
    return np.exp(lg)


def expected_rect_moments(n: int, nu: int) -> float:
    """Exact E[(k r)^nu] of the inserted rectangle at weight n, nu = 1..4.

    Computed as the h^nu-weighted jump-size sum with a certified truncation:
    the tail bound is pushed below 1e-13 * (value scale).
    """
    if nu < 1 or nu > 4:
        raise ValueError("nu must be in 1..4")
    if n < 0:
        raise ValueError("n must be >= 0")
    tol = 1e-10 * max(1.0, float(n) ** (nu / 2.0))
    H = _jump_weight_horizon(n, nu, tol)
    probs = _jump_weight_probs(n, H)
    h = np.arange(1, H + 1, dtype=np.float64)
    return float(np.sum(h**nu * probs))


def rect_width_cdf(n: int, x: float) -> float:
    """Exact finite-n P[rectangle width <= x sqrt(n)] at weight n."""
    if x <= 0:
        return 0.0
    H = _jump_weight_horizon(n)
    sqn = math.sqrt(n)
    k_hi = min(int(x * sqn), H)
    lg_n = _log_visit_prob_float(n)
    total = 0.0
    for k in range(1, k_hi + 1):
        r = np.arange(1, H // k + 1, dtype=np.float64)
        m = n + k * r
        total += float(np.sum(np.exp(_log_visit_np(m) + math.log(k) - np.log(m) - lg_n)))
    return total


def rect_width_limit_cdf(x: float) -> float:
    """Limit law of width/sqrt(n): integral_0^x y e^{-ay}/(1-e^{-ay}) dy with
    a = pi/sqrt(6) (already a probability CDF); exact dilogarithm form."""
    if x <= 0:
        return 0.0
    from scipy.special import spence

    a = math.pi / math.sqrt(6.0)
    e = math.exp(-a * x)
    li2 = float(spence(1.0 - e))  # Li_2(e^{-ax})
    return (math.pi**2 / 6.0 - li2) / (a * a) + (x / a) * math.log1p(-e)


def conditional_rows_given_width(n: int, k: int, rmax: int) -> np.ndarray:
    """Exact law of the row count r given rectangle width k at weight n,
    restricted and renormalized over the full certified horizon; the first
    rmax entries are returned."""
    H = _jump_weight_horizon(n)
    r = np.arange(1, max(rmax, H // k) + 1, dtype=np.float64)
    m = n + k * r
    lg = _log_visit_np(m) - np.log(m)
    lg -= lg.max()  # normalize in log space; raw values underflow at large n
    w = np.exp(lg)
    w /= w.sum()
    return w[:rmax]
