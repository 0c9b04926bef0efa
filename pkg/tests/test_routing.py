from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest

import segroute as sr
from segroute import INF, Instance, Network, RoutingScheme
from segroute.routing import segment_unit_loads

from instances import ECMP_SPLIT, ECMP_VIA_C, ecmp_instance, tricky_instance, tricky_published_scheme


def test_forwarding_graph_split_fractions():
    fg = sr.forwarding_graph(ecmp_instance().network, 0, 6)
    assert fg.fraction == ECMP_SPLIT
    assert not sr.is_ecmp_free(fg)


def test_waypoint_redirects_flow():
    loads = segment_unit_loads(ecmp_instance().network, (0, 2, 6))
    net = ecmp_instance().network
    got = {net.units[u][:2]: x for u, x in loads.items() if x}
    assert got == ECMP_VIA_C


def test_distances():
    d = sr.all_pairs_shortest_distances(ecmp_instance().network)
    assert list(d[0]) == [0, 1, 1, 2, 2, 2, 3]
    assert (d == d.T).all()


def test_directed_unreachable_is_inf():
    net = Network("directed", 3, ((0, 1, 1, 1), (1, 2, 1, 1)))
    d = sr.all_pairs_shortest_distances(net)
    assert d[0, 2] == 2 and d[2, 0] == INF
    with pytest.raises(sr.UnreachableError):
        sr.forwarding_graph(net, 2, 0)


def test_weights_shape_forwarding_graph():
    # 0-1-3 costs 2, 0-2-3 costs 4: only the first branch is used
    net = Network("undirected", 4, ((0, 1, 1, 1), (1, 3, 1, 1), (0, 2, 2, 1), (2, 3, 2, 1)))
    fg = sr.forwarding_graph(net, 0, 3)
    assert fg.fraction == {(0, 1): F(1), (1, 3): F(1)}
    assert sr.is_ecmp_free(fg)


def test_flow_conserved_in_forwarding_graph():
    fg = sr.forwarding_graph(tricky_instance().network, 12, 10)
    bal = {}
    for (a, b), x in fg.fraction.items():
        bal[a] = bal.get(a, 0) - x
        bal[b] = bal.get(b, 0) + x
    assert bal.pop(12) == -1 and bal.pop(10) == 1
    assert all(v == 0 for v in bal.values())


def test_undirected_edge_shares_capacity_both_ways():
    inst = Instance.build("undirected", 2, [(0, 1, 1, 1)], [(0, 1, 1), (1, 0, 1)], 0)
    v = sr.check_feasible(inst, RoutingScheme.direct(inst.demands))
    assert not v.feasible and v.loads[(0, 1)] == 2


def test_bidirected_arcs_have_own_capacity():
    inst = Instance.build("bidirected", 2, [(0, 1, 1, 1)], [(0, 1, 1), (1, 0, 1)], 0)
    v = sr.check_feasible(inst, RoutingScheme.direct(inst.demands))
    assert v.feasible
    assert v.loads[(0, 1)] == 1 and v.loads[(1, 0)] == 1


def test_load_additivity():
    inst = tricky_instance()
    scheme = tricky_published_scheme(inst)
    total = sr.scheme_loads(inst.network, inst.demands, scheme)
    parts = None
    for p in scheme:
        one = sr.scheme_loads(inst.network, [inst.demands[p.demand_index]], RoutingScheme((p.__class__(0, p.stops),)))
        parts = one if parts is None else parts + one
    assert parts == total


def test_published_scheme_feasible_and_direct_infeasible():
    inst = tricky_instance()
    ok = sr.check_feasible(inst, tricky_published_scheme(inst))
    assert ok.feasible and ok.loads.max_utilization() == 1
    bad = sr.check_feasible(inst, RoutingScheme.direct(inst.demands))
    assert bad.status == "infeasible" and bad.edge is not None
    assert "infeasible edge" in bad.describe()


def test_budget_violation_reported():
    inst = ecmp_instance(k=0)
    v = sr.check_feasible(inst, RoutingScheme.from_waypoints(inst.demands, [(2,)]))
    assert v.status == "budget-violated" and v.demand == 0


def test_load_text_is_exact():
    inst = ecmp_instance()
    v = sr.check_feasible(inst, RoutingScheme.direct(inst.demands))
    text = v.loads.to_text()
    assert "load 2 4 1/4" in text
    assert "load 0 1 1/2" in text


def test_numba_and_numpy_distances_agree():
    from segroute import _accel

    net = tricky_instance().network
    r = sr.routing.router(net)
    fast = sr.all_pairs_shortest_distances(net)
    slow = _accel.apsp_numpy(r.tail, r.head, r.weight, net.n)
    assert np.array_equal(fast, slow)
