from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

import segroute as sr
from segroute import Instance, Limits
from segroute.solvers import scheme_space_size, solve, verify, waypoint_sequences

from instances import ecmp_instance, tricky_instance


def random_instance(seed: int, mode: str = "undirected", unit: bool = False) -> Instance:
    rng = random.Random(seed)
    n = rng.randint(3, 6)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(pairs)
    edges = []
    for u, v in pairs[: rng.randint(n - 1, len(pairs))]:
        if mode == "directed" and rng.random() < 0.5:
            u, v = v, u
        w = 1 if unit else rng.randint(1, 3)
        c = 1 if unit else rng.randint(1, 3)
        edges.append((u, v, w, c))
    demands = []
    for _ in range(rng.randint(1, 3)):
        s, t = rng.sample(range(n), 2)
        demands.append((s, t, 1 if unit else rng.randint(1, 2)))
    return Instance.build(mode, n, edges, demands, rng.randint(0, 2))


def routable(inst):
    d = sr.all_pairs_shortest_distances(inst.network)
    return all(d[s, t] < sr.INF for s, t, _ in inst.demands)


def test_waypoint_sequences_order():
    seqs = list(waypoint_sequences(2, 2))
    assert seqs == [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)]


def test_brute_count_law():
    inst = Instance.build("undirected", 3, [(0, 1, 1, 1), (1, 2, 1, 1)], [(0, 2, 1), (2, 0, 1)], 1)
    res = sr.solve_brute(inst, count_all=True)
    assert res.explored == scheme_space_size(3, 1, 2) == (1 + 3) ** 2


def test_reference_instance_solvable():
    inst = tricky_instance()
    for algo in ("brute", "backtrack"):
        res = solve(inst, algo)
        assert res.yes and verify(inst, res)


def test_reference_instance_needs_budget():
    inst = tricky_instance()
    zero = Instance(inst.network, inst.demands, 0)
    assert sr.solve_backtrack(zero).status == "no"
    assert sr.solve_brute(zero).status == "no"


@pytest.mark.parametrize("mode", ["undirected", "bidirected", "directed"])
def test_brute_and_backtrack_agree(mode):
    checked = 0
    for seed in range(60):
        inst = random_instance(seed, mode)
        if not routable(inst):
            continue
        a, b = sr.solve_brute(inst), sr.solve_backtrack(inst)
        assert a.status == b.status, seed
        if a.yes:
            assert verify(inst, a) and verify(inst, b)
        checked += 1
    assert checked >= 20


def test_threads_keep_verdict_and_scheme():
    for seed in range(25):
        inst = random_instance(seed)
        if not routable(inst):
            continue
        one = sr.solve_brute(inst)
        many = sr.solve_brute(inst, Limits(threads=4))
        assert one.status == many.status
        assert one.scheme == many.scheme


def test_node_limit_aborts():
    inst = tricky_instance()
    res = sr.solve_brute(Instance(inst.network, inst.demands, 2), Limits(max_nodes=5))
    assert res.status == "aborted"
    res = sr.solve_backtrack(Instance(inst.network, inst.demands, 2), Limits(max_nodes=1))
    assert res.status in ("aborted", "yes")


def test_empty_demands():
    inst = Instance.build("undirected", 2, [(0, 1, 1, 1)], [], 0)
    assert sr.solve_brute(inst).yes and sr.solve_backtrack(inst).yes
    assert sr.minimize_mlu(inst).value == 0


def test_mlu_single_demand_split():
    res = sr.minimize_mlu(ecmp_instance(k=0))
    assert res.value == F(1, 2)
    res = sr.minimize_mlu(ecmp_instance(k=0), "binary", F(1, 1024))
    assert res.lo <= F(1, 2) <= res.hi and res.hi - res.lo <= F(1, 1024)


def test_mlu_witness_attains_value():
    inst = tricky_instance()
    res = sr.minimize_mlu(inst)
    loads = sr.scheme_loads(inst.network, inst.demands, res.scheme)
    assert loads.max_utilization() == res.value


def test_mlu_unreachable_raises():
    inst = Instance.build("directed", 2, [(0, 1, 1, 1)], [(1, 0, 1)], 0)
    with pytest.raises(sr.UnreachableError):
        sr.minimize_mlu(inst)


def test_min_total_waypoints():
    inst = tricky_instance()
    mw = sr.min_total_waypoints(inst)
    assert mw.feasible and mw.total == 2 and mw.max_per_demand == 1
    assert sr.check_feasible(inst, mw.scheme).feasible
