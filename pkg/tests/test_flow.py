import pytest

from partigrowth.counting import partition_count, strict_partition_count
from partigrowth.flow import (
    build_level_bigraph,
    hall_condition_sample,
    is_triangular,
    rational_lp_feasible,
    scan_levels,
    supply_demand_feasible,
)
from partigrowth.partitions import (
    enumerate_partitions,
    from_parts,
    inclusion_leq,
)
from partigrowth.rng import RngStream


def test_level_sizes_match_counts():
    for n in (0, 1, 5, 12):
        g = build_level_bigraph(n, "ordinary")
        assert g.left_size == partition_count(n)
        assert g.right_size == partition_count(n + 1)
    for n in (3, 9, 15):
        g = build_level_bigraph(n, "strict")
        assert g.left_size == strict_partition_count(n)
        assert g.right_size == strict_partition_count(n + 1)


def test_level_one_edges():
    g = build_level_bigraph(1, "ordinary")
    targets = {g.right[j].parts for _, j in g.edges}
    assert targets == {(2,), (1, 1)}
    assert len(g.edges) == 2


def test_edge_count_two_sweeps():
    # oracle: count covers from the other side by one-box removals
    for n in (3, 6, 10):
        g = build_level_bigraph(n, "ordinary")
        down_count = 0
        for lam in enumerate_partitions(n + 1):
            seen = set()
            for v in set(lam.parts):
                shrunk = list(lam.parts)
                shrunk.remove(v)
                if v > 1:
                    shrunk.append(v - 1)
                seen.add(tuple(sorted(shrunk, reverse=True)))
            down_count += len(seen)
        assert down_count == len(g.edges)


def test_edges_are_covers():
    for n in (2, 5, 9):
        g = build_level_bigraph(n, "ordinary")
        for i, j in g.edges:
            mu, lam = g.left[i], g.right[j]
            assert lam.weight == mu.weight + 1
            assert inclusion_leq(mu, lam)


def test_strict_staircase_out_degree():
    g = build_level_bigraph(10, "strict")
    i = g.left.index(from_parts([4, 3, 2, 1]))
    assert len(g.up[i]) == 1
    for lam in g.left:
        assert len(set(lam.parts)) == lam.length


def test_ordinary_small_feasible():
    for n in (0, 1):
        res = supply_demand_feasible(build_level_bigraph(n, "ordinary"))
        assert res.feasible


def test_flow_agrees_with_rational_simplex():
    for n in range(9):
        g = build_level_bigraph(n, "ordinary")
        assert supply_demand_feasible(g).feasible == rational_lp_feasible(g)


def test_strict_triangular_counterexamples():
    for n, k in ((10, 4), (15, 5), (21, 6)):
        g = build_level_bigraph(n, "strict")
        res = supply_demand_feasible(g)
        assert not res.feasible
        assert res.certificate_holds(g.left_size, g.right_size)
        staircase = from_parts(list(range(k, 0, -1)))
        assert staircase in res.violating_set


def test_strict_level_nine_brute_force():
    # q(9) = 8 left nodes: exhaustively check every nonempty subset
    g = build_level_bigraph(9, "strict")
    res = supply_demand_feasible(g)
    L, R = g.left_size, g.right_size
    violating = []
    for mask in range(1, 2**L):
        idx = [i for i in range(L) if mask >> i & 1]
        up = set()
        for i in idx:
            up.update(g.up[i])
        if len(up) * L < len(idx) * R:
            violating.append(idx)
    assert res.feasible == (not violating)


def test_hall_random_subsets_on_feasible_levels():
    rng = RngStream(42, 42)
    for n in range(13):
        g = build_level_bigraph(n, "ordinary")
        if supply_demand_feasible(g).feasible:
            assert hall_condition_sample(g, 200, rng)


def test_infeasible_witness_is_exact():
    g = build_level_bigraph(10, "strict")
    res = supply_demand_feasible(g)
    a = len(res.violating_set)
    assert res.violating_up_size * g.left_size < a * g.right_size  # exact ints


def test_scan_levels_report():
    reps = scan_levels(12, "strict")
    verdicts = {r.n: r.feasible for r in reps}
    assert verdicts[10] is False
    flagged = {r.n for r in reps if r.expected_infeasible}
    assert flagged == {10}
    for r in reps:
        if r.expected_infeasible:
            assert not r.feasible


def test_is_triangular():
    tri = {n for n in range(100) if is_triangular(n)}
    assert tri == {0, 1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 66, 78, 91}


def test_caps_raise():
    with pytest.raises(ValueError):
        build_level_bigraph(31, "ordinary")
    with pytest.raises(ValueError):
        build_level_bigraph(61, "strict")
    with pytest.raises(ValueError):
        build_level_bigraph(3, "other")
