from __future__ import annotations

import itertools
import random

import networkx as nx
import pytest

import segroute as sr
from segroute import Instance
from segroute.cactus import is_cactus
from segroute.reductions import (
    EC3,
    EDP2,
    MCC,
    SUBPATH_LEN,
    BinPacking,
    D1SP2,
    InvalidSource,
    OracleUnavailable,
    ThreePartition,
    binpacking_solutions,
    d1sp2_solutions,
    ec3_solutions,
    edp2_solutions,
    extend_graph,
    first_solution,
    lift_solution,
    mcc_solutions,
    reduce_2d1sp,
    reduce_2edp,
    reduce_3ec,
    reduce_3partition,
    reduce_binpacking,
    reduce_mcc,
    three_partition_solutions,
    triangle_chain,
)


# --- gadgets ------------------------------------------------------------------


def test_extend_identity():
    g = nx.cycle_graph(5)
    assert nx.utils.graphs_equal(extend_graph(g, 1), g)


def test_extend_single_edge():
    g = extend_graph(nx.path_graph(2), 3)
    assert g.number_of_nodes() == 4 and g.number_of_edges() == 3


def test_extend_rejects_zero():
    with pytest.raises(ValueError):
        extend_graph(nx.path_graph(2), 0)


@pytest.mark.parametrize("seed", range(5))
def test_extend_distance_law(seed):
    g = nx.gnp_random_graph(7, 0.5, seed=seed)
    for ell in (2, 3):
        h = extend_graph(g, ell)
        d0 = dict(nx.all_pairs_shortest_path_length(g))
        d1 = dict(nx.all_pairs_shortest_path_length(h))
        for u in g:
            for v in d0[u]:
                assert d1[u][v] == ell * d0[u][v]


def test_extend_directed_keeps_direction():
    g = extend_graph(nx.DiGraph([(0, 1)]), 2)
    assert g.is_directed() and nx.has_path(g, 0, 1) and not nx.has_path(g, 1, 0)


def test_triangle_chain_counts():
    g, (a, b) = triangle_chain(4)
    assert (g.number_of_nodes(), g.number_of_edges()) == (9, 12)
    assert nx.shortest_path_length(g, a, b) == 4
    g1, _ = triangle_chain(1)
    assert nx.is_isomorphic(g1, nx.complete_graph(3))


def chain_instance(length: int, k: int) -> Instance:
    g, (a, b) = triangle_chain(length)
    n = g.number_of_nodes()
    s3, s4, e3, e4 = n, n + 1, n + 2, n + 3
    edges = [(u, v, 1, 1) for u, v in g.edges] + [(s3, a, 1, 1), (s4, a, 1, 1), (b, e3, 1, 1), (b, e4, 1, 1)]
    return Instance.build("undirected", n + 4, edges, [(s3, e3, 1), (s4, e4, 1)], k)


@pytest.mark.parametrize("kappa", [1, 2])
def test_triangle_chain_consumes_budget(kappa):
    assert sr.solve_backtrack(chain_instance(2 * kappa, kappa)).yes
    assert not sr.solve_backtrack(chain_instance(2 * kappa, kappa - 1)).yes
    res = sr.min_total_waypoints(chain_instance(2 * kappa, kappa))
    assert res.per_demand == (kappa, kappa)


# --- closed-form structure ----------------------------------------------------


def test_2edp_counts():
    src = EDP2(4, ((0, 1), (1, 3), (0, 2), (2, 3), (1, 2)), 0, 3, 0, 2)
    out = reduce_2edp(src)
    n, m = len(range(src.n)), len(src.arcs)
    assert out.instance.network.n == n + m + 2
    assert out.instance.network.m == 2 * m + n + 3
    assert out.instance.d == 3 and out.instance.k == n
    assert out.instance.network.mode == "directed"


def test_2d1sp_structure():
    src = D1SP2(5, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0)), 0, 2, 3, 4)
    out = reduce_2d1sp(src)
    assert out.instance.d == 4 and out.instance.k == 5
    assert out.meta["long_chain"] == 10
    assert out.meta["short_chain"] == 5 - 2
    assert len(out.annotations["shortcut"]) == 5
    g = nx.Graph([(u, v) for u, v, _, _ in out.instance.network.edges])
    # original vertices sit (n+2) apart along extended edges
    assert nx.shortest_path_length(g, out.vertex(("v", 0)), out.vertex(("x", 0, 1, 1))) == 1


@pytest.mark.parametrize("mode, count", [("undirected", 12), ("bidirected", 16)])
def test_mcc_counts(mode, count):
    src = MCC(4, ((0, 2), (1, 3), (0, 3)), 2, (1, 1, 2, 2))
    out = reduce_mcc(src, mode)
    d = 2
    assert out.instance.d == count
    assert count == (2 * d * d + 2 * d if mode == "undirected" else 4 * d * d)
    n_per = 2
    sep = 2 * (3 * n_per * d + (d - 1) * SUBPATH_LEN)
    want = 2 * sep + 3 * n_per * d + (d - 1) * SUBPATH_LEN
    assert set(out.meta["lengths"].values()) == {want}
    assert want % 2 == 0


def test_mcc_padding_recorded():
    src = MCC(3, ((0, 1), (1, 2), (0, 2)), 3, (1, 2, 3))
    out = reduce_mcc(src)
    assert out.meta["colors"] == 4
    assert "padding:fillers" in out.annotations and "padding:extra-color" in out.annotations


def test_mcc_rejects_directed_and_bad_colors():
    src = MCC(2, ((0, 1),), 2, (1, 2))
    with pytest.raises(ValueError):
        reduce_mcc(src, "directed")
    with pytest.raises(InvalidSource):
        reduce_mcc(MCC(2, ((0, 1),), 2, (1, 3)))


def test_3ec_structure():
    out = reduce_3ec(EC3(4, ((0, 1), (0, 2), (1, 2), (2, 3))))
    net = out.instance.network
    assert (net.n, net.m, out.instance.d, out.instance.k) == (8, 16, 8, 1)
    cover = set(out.annotations["vertex-cover"])
    assert len(cover) == 4 and all(u in cover or v in cover for u, v, _, _ in net.edges)


def test_binpacking_structure():
    out = reduce_binpacking(BinPacking((2, 3, 4, 5), 3, 6))
    net = out.instance.network
    assert (net.n, net.m, out.instance.d) == (5, 7, 5)
    assert all(c == 6 for *_, c in net.edges)
    assert set(out.annotations["vertex-cover"]) == {0, 1}


@pytest.mark.parametrize("mode", ["undirected", "bidirected", "directed"])
def test_binpacking_modes(mode):
    src = BinPacking((2, 3, 4, 5), 3, 6)
    out = reduce_binpacking(src, mode)
    assert sr.solve_backtrack(out.instance).yes
    scheme = lift_solution(src, first_solution(binpacking_solutions(src)), out)
    assert sr.check_feasible(out.instance, scheme).feasible


def test_empty_binpacking_lifts_to_dummy_only():
    src = BinPacking((), 2, 3)
    out = reduce_binpacking(src)
    scheme = lift_solution(src, (), out)
    assert len(scheme) == 1 and scheme[0].stops == (0, 1)
    assert sr.check_feasible(out.instance, scheme).feasible


def test_3partition_structure():
    src = ThreePartition((4, 5, 5, 5, 5, 6), 15)
    out = reduce_3partition(src)
    assert is_cactus(out.instance.network)
    caps = sorted(c for *_, c in out.instance.network.edges)
    assert caps == [15, 15, 15, 15, 15, 15, 30]


def test_3partition_validation():
    with pytest.raises(InvalidSource):
        reduce_3partition(ThreePartition((1, 2, 3), 6))
    with pytest.raises(ValueError):
        reduce_3partition(ThreePartition((4, 5, 6), 15), "directed")


def test_annotations_cover_demands_and_vertices():
    outs = [
        reduce_2edp(EDP2(3, ((0, 1), (1, 2)), 0, 2, 0, 1)),
        reduce_2d1sp(D1SP2(3, ((0, 1), (1, 2)), 0, 2, 1, 2)),
        reduce_3ec(EC3(3, ((0, 1), (1, 2)))),
        reduce_binpacking(BinPacking((1, 2), 2, 3)),
        reduce_3partition(ThreePartition((4, 5, 6), 15)),
    ]
    for out in outs:
        assert len(out.roles) == out.instance.d and all(out.roles)
        assert len(out.names) == out.instance.network.n
        lines = out.map_lines()
        assert sum(line.startswith("map name:") for line in lines) == out.instance.network.n
        assert sum(line.startswith("map demand:") for line in lines) == out.instance.d


# --- lifting ------------------------------------------------------------------


def test_invalid_solutions_rejected():
    ec = EC3(3, ((0, 1), (1, 2)))
    with pytest.raises(InvalidSource):
        lift_solution(ec, (0, 0), reduce_3ec(ec))
    bp = BinPacking((4, 4), 1, 6)
    with pytest.raises(InvalidSource):
        lift_solution(bp, (0, 0), reduce_binpacking(bp))
    tp = ThreePartition((4, 5, 6), 15)
    with pytest.raises(InvalidSource):
        lift_solution(tp, (1, 0, 0), reduce_3partition(tp))
    e = EDP2(3, ((0, 1), (1, 2)), 0, 2, 0, 2)
    with pytest.raises(InvalidSource):
        lift_solution(e, ((0, 1, 2), (0, 1, 2)), reduce_2edp(e))
    g = D1SP2(4, ((0, 1), (1, 2), (2, 3), (3, 0)), 0, 1, 2, 3)
    with pytest.raises(InvalidSource):
        lift_solution(g, ((0, 3, 2, 1), (2, 3)), reduce_2d1sp(g))
    m = MCC(2, (), 2, (1, 2))
    with pytest.raises(InvalidSource):
        lift_solution(m, (0, 1), reduce_mcc(m))


def test_lift_unknown_source_type():
    with pytest.raises(TypeError):
        lift_solution(object(), None, None)


def test_3ec_lifted_schemes_feasible():
    src = EC3(4, ((0, 1), (0, 2), (1, 2), (2, 3)))
    out = reduce_3ec(src)
    for col in ec3_solutions(src):
        scheme = lift_solution(src, col, out)
        assert sr.check_feasible(out.instance, scheme).feasible


def test_mcc_lift_with_padding():
    src = MCC(3, ((0, 1), (1, 2), (0, 2)), 3, (1, 2, 3))
    out = reduce_mcc(src)
    for clique in mcc_solutions(src):
        assert sr.check_feasible(out.instance, lift_solution(src, clique, out)).feasible


def test_2d1sp_random_lifts():
    rng = random.Random(11)
    done = 0
    while done < 15:
        n = rng.randint(3, 5)
        edges = tuple(e for e in itertools.combinations(range(n), 2) if rng.random() < 0.6)
        g = nx.Graph(edges)
        if g.number_of_nodes() < n or not nx.is_connected(g):
            continue
        s1, t1, s2, t2 = (rng.randrange(n) for _ in range(4))
        if s1 == t1 or s2 == t2:
            continue
        src = D1SP2(n, edges, s1, t1, s2, t2)
        out = reduce_2d1sp(src)
        for sol in d1sp2_solutions(src):
            scheme = lift_solution(src, sol, out)
            assert sr.check_feasible(out.instance, scheme).feasible, (src, sol)
        done += 1


# --- oracle caps ----------------------------------------------------------------


def test_oracle_caps():
    with pytest.raises(OracleUnavailable):
        list(binpacking_solutions(BinPacking(tuple([1] * 7), 2, 8)))
    with pytest.raises(OracleUnavailable):
        list(edp2_solutions(EDP2(9, ((0, 1),), 0, 1, 0, 1)))
    with pytest.raises(OracleUnavailable):
        list(three_partition_solutions(ThreePartition(tuple([5] * 12), 15)))


def test_three_partition_oracle():
    sols = list(three_partition_solutions(ThreePartition((4, 5, 5, 5, 5, 6), 15)))
    groups = {frozenset(sorted((4, 5, 5, 5, 5, 6)[i] for i in range(6) if a[i] == 0)) for a in sols}
    assert frozenset((4, 5, 6)) in groups and frozenset((5,)) in groups
