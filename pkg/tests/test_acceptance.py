"""Acceptance suite: one test per criterion, each checked at its stated tolerance."""
from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction as F

import networkx as nx
import pytest

import segroute as sr
from segroute import Instance, RoutingScheme
from segroute.cactus import build_skeleton, is_cactus, solve_cycle_min, solve_unit_cactus
from segroute.reductions import (
    EC3,
    EDP2,
    MCC,
    SUBPATH_LEN,
    BinPacking,
    D1SP2,
    ThreePartition,
    binpacking_feasible,
    chained_cycles,
    d1sp2_solutions,
    ec3_solutions,
    edp2_solutions,
    extend_graph,
    lift_solution,
    mcc_solutions,
    random_unit_cactus,
    reduce_2d1sp,
    reduce_2edp,
    reduce_3ec,
    reduce_3partition,
    reduce_binpacking,
    reduce_mcc,
    three_partition_feasible,
)
from segroute.routing import clear_router_cache, segment_unit_loads

from instances import (
    CYCLE_CASES,
    ECMP_SPLIT,
    ECMP_VIA_C,
    MIDDLE_PATH,
    RING6,
    ecmp_instance,
    ring_instance,
    tricky_instance,
    tricky_published_scheme,
)
from properties import CASES, PROPERTIES, executed


# 1 -----------------------------------------------------------------------------


def test_ecmp_fractions(criterion):
    with criterion(1, "ECMP split fractions are exact") as c:
        net = ecmp_instance().network
        sr.forwarding_graph(tricky_instance().network, 0, 9)  # warm the compiled kernels
        best = float("inf")
        for _ in range(20):
            clear_router_cache()
            t0 = time.perf_counter()
            fg = sr.forwarding_graph(net, 0, 6)
            via = segment_unit_loads(net, (0, 2, 6))
            best = min(best, time.perf_counter() - t0)
        assert fg.fraction == ECMP_SPLIT
        got = {net.units[u][:2]: x for u, x in via.items() if x}
        assert got == ECMP_VIA_C
        assert all(isinstance(x, F) for x in fg.fraction.values())
        c.note(f"{best * 1e3:.3f} ms")
        assert best < 1e-3


# 2 -----------------------------------------------------------------------------


def test_tricky_instance(criterion):
    with criterion(2, "tricky instance solved, published scheme checks") as c:
        t0 = time.perf_counter()
        inst = tricky_instance()
        assert inst.k == 1
        assert sr.solve_brute(inst).yes
        v = sr.check_feasible(inst, tricky_published_scheme(inst))
        assert v.feasible
        assert all(x <= 1 for _, x in v.loads.items())
        assert all(v.loads[e] == 1 for e in MIDDLE_PATH)
        elapsed = time.perf_counter() - t0
        c.note(f"{elapsed * 1e3:.1f} ms")
        assert elapsed < 1.0


# 3 -----------------------------------------------------------------------------


def _canonical(demands, L):
    """Smallest relabelling of an unordered demand multiset under ring rotations and reflections."""
    best = None
    for r in range(L):
        for s in (1, -1):
            m = tuple(sorted(tuple(sorted(((s * a + r) % L, (s * b + r) % L))) for a, b in demands))
            if best is None or m < best:
                best = m
    return best


def test_cycle_solver_suite(criterion):
    with criterion(3, "cycle solver equals exhaustive enumeration, L=3..8, d<=3") as c:
        t0 = time.perf_counter()
        # the three illustrated six-cycle cases, verbatim (with orientation) against solve_brute
        for name, (demands, feasible, waypoints) in CYCLE_CASES.items():
            v = solve_cycle_min(RING6, demands)
            assert v.feasible == feasible, name
            inst = ring_instance(6, demands, 3)
            assert sr.solve_brute(inst).yes == feasible, name
            if feasible:
                assert v.min_total == waypoints == sr.min_total_waypoints(inst).total
        checked = 0
        for L in range(3, 9):
            pairs = list(itertools.combinations(range(L), 2))
            seen = set()
            for d in (1, 2, 3):
                for demands in itertools.combinations_with_replacement(pairs, d):
                    key = _canonical(demands, L)
                    if key in seen:
                        continue
                    seen.add(key)
                    v = solve_cycle_min(range(L), demands)
                    inst = ring_instance(L, demands, 3)
                    oracle = sr.min_total_waypoints(inst)
                    fits = v.feasible and v.min_max <= 3
                    assert oracle.feasible == fits, (L, demands)
                    if fits:
                        assert oracle.total == v.min_total, (L, demands)
                        assert oracle.max_per_demand == v.min_max, (L, demands)
                    checked += 1
        elapsed = time.perf_counter() - t0
        c.note(f"{checked} demand classes")
        assert elapsed < 120


# 4 -----------------------------------------------------------------------------


def test_cactus_oracle_suite(criterion):
    with criterion(4, "cactus DP equals brute force on 300+ random unit cacti") as c:
        t0 = time.perf_counter()
        disagreements = 0
        yes = 0
        seeds = range(320)
        for seed in seeds:
            rng = random.Random(10_000 + seed)
            inst = random_unit_cactus(seed, rng.randint(2, 12), d=rng.randint(1, 3), k=rng.randint(0, 2))
            assert inst.network.n <= 12 and inst.d <= 3 and inst.k <= 2
            assert is_cactus(inst.network)
            a, b = solve_unit_cactus(inst), sr.solve_brute(inst)
            disagreements += a.status != b.status
            if a.yes:
                yes += 1
                assert sr.check_feasible(inst, a.scheme).feasible, seed
        c.note(f"{len(seeds)} instances, {yes} yes")
        assert disagreements == 0
        assert time.perf_counter() - t0 < 300


# 5 -----------------------------------------------------------------------------


def test_binpacking_equivalence(criterion):
    with criterion(5, "bin packing oracle equals solver on the reduction") as c:
        t0 = time.perf_counter()
        src = BinPacking((2, 3, 4, 5), 3, 6)
        out = reduce_binpacking(src)
        assert sr.solve_backtrack(out.instance).yes
        checked = mismatches = 0
        # item order does not matter to either side, so items range over multisets
        for cap in range(1, 9):
            for bins in range(0, 5):
                for ell in range(0, 7):
                    for items in itertools.combinations_with_replacement(range(1, 9), ell):
                        src = BinPacking(items, bins, cap)
                        got = sr.solve_backtrack(reduce_binpacking(src).instance).yes
                        mismatches += got != binpacking_feasible(src)
                        checked += 1
        elapsed = time.perf_counter() - t0
        c.note(f"{checked} instances")
        assert mismatches == 0
        assert elapsed < 60


# 6 -----------------------------------------------------------------------------


def test_three_partition_equivalence(criterion):
    with criterion(6, "3-partition oracle equals solver on the reduction (two groups)") as c:
        t0 = time.perf_counter()
        src = ThreePartition((4, 5, 5, 5, 5, 6), 15)
        out = reduce_3partition(src)
        res = sr.solve_backtrack(out.instance)
        assert res.yes and is_cactus(out.instance.network)
        groups = {}
        for p in res.scheme:
            groups.setdefault(p.waypoints, []).append(src.values[p.demand_index])
        assert sorted(sorted(g) for g in groups.values()) in ([[4, 5, 6], [5, 5, 5]], [[5, 5, 5], [4, 5, 6]])
        checked = mismatches = 0
        for B in range(1, 17):
            allowed = [a for a in range(1, B) if B < 4 * a and 2 * a < B]
            for values in itertools.combinations_with_replacement(allowed, 6):
                if sum(values) != 2 * B:
                    continue
                src = ThreePartition(values, B)
                out = reduce_3partition(src)
                assert is_cactus(out.instance.network)
                mismatches += sr.solve_backtrack(out.instance).yes != three_partition_feasible(src)
                checked += 1
        elapsed = time.perf_counter() - t0
        c.note(f"{checked} instances")
        assert checked > 0 and mismatches == 0
        assert elapsed < 60


# 7 -----------------------------------------------------------------------------


def _connected_graphs(max_n):
    for n in range(1, max_n + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            edges = tuple(p for i, p in enumerate(pairs) if mask >> i & 1)
            g = nx.Graph()
            g.add_nodes_from(range(n))
            g.add_edges_from(edges)
            if nx.is_connected(g):
                yield n, edges


def test_three_edge_coloring_equivalence(criterion):
    with criterion(7, "3-edge-colouring oracle equals solver on the reduction") as c:
        t0 = time.perf_counter()
        src = EC3(4, ((0, 1), (0, 2), (1, 2), (2, 3)))
        out = reduce_3ec(src)
        assert sr.solve_backtrack(out.instance).yes
        pictured = (0, 1, 2, 0)  # 12 red, 13 green, 23 blue, 34 red
        assert pictured in set(ec3_solutions(src))
        assert sr.check_feasible(out.instance, lift_solution(src, pictured, out)).feasible
        checked = mismatches = 0
        for n, edges in _connected_graphs(4):
            src = EC3(n, edges)
            oracle = next(ec3_solutions(src), None) is not None
            mismatches += sr.solve_backtrack(reduce_3ec(src).instance).yes != oracle
            checked += 1
        elapsed = time.perf_counter() - t0
        c.note(f"{checked} labelled graphs")
        assert mismatches == 0
        assert elapsed < 120


# 8 -----------------------------------------------------------------------------


def _within_budget(inst, scheme):
    return all(p.n_waypoints <= inst.k for p in scheme)


def test_lifting_soundness(criterion):
    with criterion(8, "lifted schemes feasible for 2-EDP, 2D1SP, clique") as c:
        rng = random.Random(2024)
        lifted = 0
        # arc-disjoint paths on digraphs with up to six vertices
        made = 0
        while made < 60:
            n = rng.randint(3, 6)
            arcs = tuple(a for a in itertools.permutations(range(n), 2) if rng.random() < 0.35)
            s1, t1, s2, t2 = (rng.randrange(n) for _ in range(4))
            if s1 == t1 or s2 == t2 or not arcs:
                continue
            src = EDP2(n, arcs, s1, t1, s2, t2)
            out = reduce_2edp(src)
            assert out.instance.d == 3
            assert out.instance.network.n == n + len(arcs) + 2
            for sol in edp2_solutions(src):
                scheme = lift_solution(src, sol, out)
                assert sr.check_feasible(out.instance, scheme).feasible and _within_budget(out.instance, scheme)
                lifted += 1
            made += 1
        # edge-disjoint paths with a shortest first path, graphs with up to five vertices
        made = 0
        while made < 40:
            n = rng.randint(3, 5)
            edges = tuple(e for e in itertools.combinations(range(n), 2) if rng.random() < 0.6)
            g = nx.Graph()
            g.add_nodes_from(range(n))
            g.add_edges_from(edges)
            if not nx.is_connected(g):
                continue
            s1, t1, s2, t2 = (rng.randrange(n) for _ in range(4))
            if s1 == t1 or s2 == t2:
                continue
            src = D1SP2(n, edges, s1, t1, s2, t2)
            out = reduce_2d1sp(src)
            assert out.instance.d == 4
            assert out.meta["short_chain"] == n - nx.shortest_path_length(g, s1, t1)
            for sol in d1sp2_solutions(src):
                scheme = lift_solution(src, sol, out)
                assert sr.check_feasible(out.instance, scheme).feasible and _within_budget(out.instance, scheme)
                lifted += 1
            made += 1
        # clique toy: two colours of two vertices, every cross-edge pattern
        cross = [(0, 2), (0, 3), (1, 2), (1, 3)]
        for mask in range(1, 16):
            edges = tuple(e for i, e in enumerate(cross) if mask >> i & 1)
            src = MCC(4, edges, 2, (1, 1, 2, 2))
            for mode, count in (("undirected", 12), ("bidirected", 16)):
                out = reduce_mcc(src, mode)
                assert out.instance.d == count
                n_per, d = 2, 2
                sep = 2 * (3 * n_per * d + (d - 1) * SUBPATH_LEN)
                length = 2 * sep + 3 * n_per * d + (d - 1) * SUBPATH_LEN
                assert set(out.meta["lengths"].values()) == {length} and length % 2 == 0
                for clique in mcc_solutions(src):
                    scheme = lift_solution(src, clique, out)
                    assert sr.check_feasible(out.instance, scheme).feasible and _within_budget(out.instance, scheme)
                    lifted += 1
        # distance law of the extended graph
        for seed in range(10):
            g = nx.gnp_random_graph(6, 0.5, seed=seed)
            h = extend_graph(g, 2)
            d0 = dict(nx.all_pairs_shortest_path_length(g))
            d1 = dict(nx.all_pairs_shortest_path_length(h))
            assert all(d1[u][v] == 2 * d0[u][v] for u in g for v in d0[u])
        c.note(f"{lifted} lifted schemes")


# 9 -----------------------------------------------------------------------------


def test_cactus_scaling(criterion):
    with criterion(9, "cactus DP runtime grows at most linearly") as c:
        sizes = (100, 200, 400, 800)
        times = {}
        solve_unit_cactus(chained_cycles(50, d=2, k=1))  # warm-up
        for n in sizes:
            inst = chained_cycles(n, d=2, k=1)
            best = float("inf")
            for _ in range(5):
                clear_router_cache()
                t0 = time.perf_counter()
                res = solve_unit_cactus(inst)
                best = min(best, time.perf_counter() - t0)
            assert res.yes
            times[n] = best
        c.note(", ".join(f"n={n}: {t * 1e3:.1f} ms" for n, t in times.items()))
        assert all(t < 1.0 for t in times.values())
        base = times[sizes[0]] / sizes[0]
        for n in sizes[1:]:
            # per-vertex cost may not exceed twice the smallest size's
            assert times[n] / n <= 2 * base, (n, times)


# 10 ----------------------------------------------------------------------------


def test_property_suite(criterion):
    with criterion(10, "property suite, 1000 cases each") as c:
        counts = {}
        for name, prop in PROPERTIES.items():
            before = executed[name]
            prop()
            counts[name] = executed[name] - before
        c.note(", ".join(f"{k}={v}" for k, v in counts.items()))
        assert all(v >= CASES for v in counts.values())
