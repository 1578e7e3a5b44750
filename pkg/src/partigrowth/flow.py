"""One-box growth between adjacent levels of the Young graph, as a
transportation feasibility problem.

Level n and level n+1 form a bipartite graph under the add-one-box cover
relation.  A uniform one-box growth rule exists iff the balanced
transportation system (every source ships the same amount, every sink
receives the same amount) has a non-negative solution, which by max-flow
duality is equivalent to |A^up| / |A| >= p(n+1)/p(n) for every subset A of
level n.  The solver certifies infeasibility with an explicit violating
subset extracted from the min cut and re-verified in exact integers.

For strict partitions the staircase (k, k-1, ..., 1) has exactly one upward
neighbor, so triangular levels are infeasible once the level sizes strictly
increase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .partitions import Partition, enumerate_partitions, enumerate_strict_partitions

__all__ = [
    "LevelBigraph",
    "FeasibilityResult",
    "LevelReport",
    "build_level_bigraph",
    "supply_demand_feasible",
    "rational_lp_feasible",
    "hall_condition_sample",
    "scan_levels",
    "is_triangular",
    "ORDINARY_CAP",
    "STRICT_CAP",
]

ORDINARY_CAP = 30
STRICT_CAP = 60


@dataclass
class LevelBigraph:
    """Adjacent levels of the (ordinary or strict) Young graph with one-box
    cover edges, as index lists into the two partition levels."""

    n: int
    kind: str  # "ordinary" | "strict"
    left: list[Partition]
    right: list[Partition]
    edges: list[tuple[int, int]]
    up: list[list[int]]  # up[i] = right-indices reachable from left i

    @property
    def left_size(self) -> int:
        return len(self.left)

    @property
    def right_size(self) -> int:
        return len(self.right)


def _one_box_covers(mu: Partition, strict: bool) -> list[Partition]:
    out = []
    seen = set()
    values = sorted(set(mu.parts), reverse=True)
    for v in values:
        grown = list(mu.parts)
        grown[grown.index(v)] = v + 1
        lam = tuple(sorted(grown, reverse=True))
        if strict and len(set(lam)) != len(lam):
            continue
        if lam not in seen:
            seen.add(lam)
            out.append(Partition(lam))
    lam = tuple(sorted(mu.parts + (1,), reverse=True))
    if not (strict and lam.count(1) > 1):
        if lam not in seen:
            out.append(Partition(lam))
    return out


def build_level_bigraph(n: int, kind: str = "ordinary") -> LevelBigraph:
    """All one-box cover edges between level n and level n+1."""
    if kind == "ordinary":
        if n > ORDINARY_CAP:
            raise ValueError(f"ordinary level {n} exceeds cap {ORDINARY_CAP}")
        left = enumerate_partitions(n)
        right = enumerate_partitions(n + 1)
        strict = False
    elif kind == "strict":
        if n > STRICT_CAP:
            raise ValueError(f"strict level {n} exceeds cap {STRICT_CAP}")
        left = enumerate_strict_partitions(n)
        right = enumerate_strict_partitions(n + 1)
        strict = True
    else:
        raise ValueError("kind must be 'ordinary' or 'strict'")
    index = {lam: j for j, lam in enumerate(right)}
    edges = []
    up: list[list[int]] = []
    for i, mu in enumerate(left):
        outs = sorted(index[lam] for lam in _one_box_covers(mu, strict))
        up.append(outs)
        edges.extend((i, j) for j in outs)
    return LevelBigraph(n, kind, left, right, edges, up)


@dataclass
class FeasibilityResult:
    feasible: bool
    max_flow: int
    required_flow: int
    violating_set: list[Partition] | None
    violating_up_size: int | None

    def certificate_holds(self, left_size: int, right_size: int) -> bool:
        """Exact integer check of the reversed inequality for the witness."""
        if self.violating_set is None:
            return False
        a = len(self.violating_set)
        return self.violating_up_size * left_size < a * right_size


def supply_demand_feasible(g: LevelBigraph) -> FeasibilityResult:
    """Decide the balanced transportation feasibility by integer max-flow.

    Each left node supplies right_size units, each right node absorbs
    left_size units (integer scaling avoids rationals); middle edges are
    effectively uncapacitated.  On infeasibility the violating set is the
    left part of the source side of a min cut, re-verified exactly.
    """
    L, R = g.left_size, g.right_size
    required = L * R
    src = 0
    sink = 1 + L + R
    n_nodes = sink + 1
    rows, cols, caps = [], [], []
    for i in range(L):
        rows.append(src)
        cols.append(1 + i)
        caps.append(R)
    big = required + 1
    for i, j in g.edges:
        rows.append(1 + i)
        cols.append(1 + L + j)
        caps.append(big)
    for j in range(R):
        rows.append(1 + L + j)
        cols.append(sink)
        caps.append(L)
    cap = csr_matrix(
        (np.array(caps, dtype=np.int32), (np.array(rows), np.array(cols))),
        shape=(n_nodes, n_nodes),
    )
    res = maximum_flow(cap, src, sink)
    if res.flow_value == required:
        return FeasibilityResult(True, int(res.flow_value), required, None, None)
    # residual BFS from the source over cap - flow (the flow matrix carries
    # antisymmetric reverse entries, so reverse residual edges appear free)
    residual = cap - res.flow
    residual.eliminate_zeros()
    reach = np.zeros(n_nodes, dtype=bool)
    stack = [src]
    reach[src] = True
    indptr, indices, data = residual.indptr, residual.indices, residual.data
    while stack:
        u = stack.pop()
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if data[e] > 0 and not reach[v]:
                reach[v] = True
                stack.append(v)
    A_idx = [i for i in range(L) if reach[1 + i]]
    up = set()
    for i in A_idx:
        up.update(g.up[i])
    return FeasibilityResult(
        False,
        int(res.flow_value),
        required,
        [g.left[i] for i in A_idx],
        len(up),
    )


# ---------------------------------------------------------------------------
# exact rational feasibility (independent of the flow solver)
# ---------------------------------------------------------------------------

def rational_lp_feasible(g: LevelBigraph) -> bool:
    """Phase-I simplex in exact rationals for the transportation equalities.

    Independent of the max-flow path: different algorithm, different
    arithmetic.  Practical for left levels up to ~8.
    """
    L, R = g.left_size, g.right_size
    E = len(g.edges)
    m = L + R
    # equality rows over edge variables
    rows = [[Fraction(0)] * E for _ in range(m)]
    b = [Fraction(R)] * L + [Fraction(L)] * R
    for e, (i, j) in enumerate(g.edges):
        rows[i][e] = Fraction(1)
        rows[L + j][e] = Fraction(1)
    return _phase1_simplex(rows, b)


def _phase1_simplex(rows: list[list[Fraction]], b: list[Fraction]) -> bool:
    m = len(rows)
    ncols = len(rows[0])
    # tableau [A | I | b], basis = artificials
    T = []
    for i in range(m):
        r = list(rows[i]) + [Fraction(0)] * m + [b[i]]
        if b[i] < 0:
            r = [-v for v in r]
        r[ncols + i] = Fraction(1)
        T.append(r)
    width = ncols + m + 1
    basis = [ncols + i for i in range(m)]
    # reduced costs for min(sum of artificials): r_j = c_j - sum_i T[i][j]
    red = [Fraction(0)] * (width - 1)
    obj = Fraction(0)
    for j in range(width - 1):
        cj = Fraction(1) if j >= ncols else Fraction(0)
        red[j] = cj - sum(T[i][j] for i in range(m))
    obj = -sum(T[i][-1] for i in range(m))  # negative of artificial mass
    while True:
        enter = -1
        for j in range(width - 1):  # Bland: first negative reduced cost
            if red[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            # unbounded phase-I cannot happen (objective bounded below by 0)
            raise RuntimeError("phase-I simplex detected unboundedness")
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [v - f * w for v, w in zip(T[i], T[leave])]
        f = red[enter]
        if f != 0:
            for j in range(width - 1):
                red[j] -= f * T[leave][j]
            obj -= f * T[leave][-1]
        basis[leave] = enter
    # artificial mass left in the optimum decides feasibility
    mass = sum(T[i][-1] for i in range(m) if basis[i] >= ncols)
    return mass == 0


def hall_condition_sample(g: LevelBigraph, trials: int, rng) -> bool:
    """Exact integer Hall-type check on random subsets: no sampled A may
    violate |A^up| * left_size >= |A| * right_size."""
    L, R = g.left_size, g.right_size
    for _ in range(trials):
        size = int(rng.gen.integers(1, L + 1))
        idx = rng.gen.choice(L, size=size, replace=False)
        up = set()
        for i in idx:
            up.update(g.up[i])
        if len(up) * L < size * R:
            return False
    return True


def is_triangular(n: int) -> bool:
    k = (math.isqrt(8 * n + 1) - 1) // 2
    return k * (k + 1) // 2 == n


@dataclass
class LevelReport:
    n: int
    kind: str
    left_size: int
    right_size: int
    feasible: bool
    violating_set_size: int
    expected_infeasible: bool  # strict triangular levels >= 10 must fail


def scan_levels(n_max: int, kind: str = "ordinary") -> list[LevelReport]:
    """Feasibility verdicts for all levels 0..n_max of the chosen graph."""
    out = []
    for n in range(n_max + 1):
        g = build_level_bigraph(n, kind)
        res = supply_demand_feasible(g)
        flagged = kind == "strict" and n >= 10 and is_triangular(n)
        out.append(
            LevelReport(
                n,
                kind,
                g.left_size,
                g.right_size,
                res.feasible,
                0 if res.violating_set is None else len(res.violating_set),
                flagged,
            )
        )
    return out
