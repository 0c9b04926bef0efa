"""Shortest paths, ECMP forwarding graphs, load accounting and feasibility."""
from __future__ import annotations

import threading
from collections import OrderedDict, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _accel
from ._accel import INF
from .model import Instance, Network, RoutingScheme, validate_scheme


class UnreachableError(ValueError):
    """A segment's target cannot be reached from its start."""

    def __init__(self, u, v, demand=None):
        self.u, self.v, self.demand = u, v, demand
        where = f" (demand {demand})" if demand is not None else ""
        super().__init__(f"vertex {v} is unreachable from {u}{where}")


@dataclass(frozen=True)
class ForwardingGraph:
    """Union of all shortest ``source -> target`` paths with ECMP fractions.

    ``arcs`` lists oriented arcs ``(a, b)`` in network arc order; ``fraction``
    maps each of them to the share of one unit of flow it carries.
    ``unit_loads`` is the same data keyed by capacity unit.
    """

    source: int
    target: int
    arcs: tuple[tuple[int, int], ...]
    fraction: dict
    unit_loads: tuple[tuple[int, Fraction], ...] = field(repr=False, default=())

    def __hash__(self):
        return hash((self.source, self.target, self.arcs))


class Router:
    """Per-network cache of distances and forwarding graphs (thread-safe)."""

    def __init__(self, net: Network):
        self.net = net
        n = net.n
        arcs = net.arcs
        self.tail = np.array([a[0] for a in arcs], dtype=np.int64)
        self.head = np.array([a[1] for a in arcs], dtype=np.int64)
        self.weight = np.array([a[2] for a in arcs], dtype=np.int64)
        self.unit = np.array([a[3] for a in arcs], dtype=np.int64)
        self.fwd = _csr(n, self.tail, self.head, self.weight)
        self.rev = _csr(n, self.head, self.tail, self.weight)
        self._lock = threading.Lock()
        self._from: dict[int, np.ndarray] = {}
        self._to: dict[int, np.ndarray] = {}
        self._fg: dict[tuple[int, int], ForwardingGraph] = {}
        self.extra: dict = {}  # solver-level caches keyed by the solver

    def dist_from(self, u: int) -> np.ndarray:
        d = self._from.get(u)
        if d is None:
            indptr, indices, w, order = self.fwd
            d = _accel.sssp(indptr, indices, w, self.tail[order], u)
            with self._lock:
                self._from[u] = d
        return d

    def dist_to(self, v: int) -> np.ndarray:
        if not self.net.directed:
            return self.dist_from(v)
        d = self._to.get(v)
        if d is None:
            indptr, indices, w, order = self.rev
            d = _accel.sssp(indptr, indices, w, self.head[order], v)
            with self._lock:
                self._to[v] = d
        return d

    def distance(self, u: int, v: int) -> int | None:
        x = int(self.dist_from(u)[v])
        return None if x >= INF else x

    def forwarding_graph(self, u: int, v: int) -> ForwardingGraph:
        key = (u, v)
        fg = self._fg.get(key)
        if fg is not None:
            return fg
        fg = self._build_fg(u, v)
        with self._lock:
            self._fg[key] = fg
        return fg

    def _build_fg(self, u, v):
        if u == v:
            return ForwardingGraph(u, v, (), {}, ())
        du = self.dist_from(u)
        total = int(du[v])
        if total >= INF:
            raise UnreachableError(u, v)
        dv = self.dist_to(v)
        mask = _accel.fg_mask(self.tail, self.head, self.weight, du, dv, total)
        idx = np.flatnonzero(mask)
        out = defaultdict(list)
        for a in idx:
            out[int(self.tail[a])].append(int(a))
        inflow = defaultdict(Fraction)
        inflow[u] = Fraction(1)
        frac_by_arc = {}
        # distances strictly increase along arcs, so sorting by distance is topological
        for x in sorted(out, key=lambda x: int(du[x])):
            share = inflow[x] / len(out[x])
            for a in out[x]:
                frac_by_arc[a] = share
                inflow[int(self.head[a])] += share
        arcs = tuple((int(self.tail[a]), int(self.head[a])) for a in idx)
        fraction = {(int(self.tail[a]), int(self.head[a])): frac_by_arc[a] for a in idx}
        unit_loads = tuple((int(self.unit[a]), frac_by_arc[a]) for a in idx)
        return ForwardingGraph(u, v, arcs, fraction, unit_loads)


def _csr(n, src, dst, w):
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    indptr = np.cumsum(indptr)
    return indptr, dst[order].astype(np.int64), w[order].astype(np.int64), order


_ROUTERS: OrderedDict = OrderedDict()
_ROUTERS_LOCK = threading.Lock()
_ROUTERS_MAX = 256


def router(net: Network) -> Router:
    """Shared router for ``net`` (value-keyed, bounded LRU)."""
    with _ROUTERS_LOCK:
        r = _ROUTERS.get(net)
        if r is not None:
            _ROUTERS.move_to_end(net)
            return r
    r = Router(net)
    with _ROUTERS_LOCK:
        r = _ROUTERS.setdefault(net, r)
        _ROUTERS.move_to_end(net)
        while len(_ROUTERS) > _ROUTERS_MAX:
            _ROUTERS.popitem(last=False)
    return r


def clear_router_cache() -> None:
    """Drop every cached router (distances, forwarding graphs, candidate tables)."""
    with _ROUTERS_LOCK:
        _ROUTERS.clear()


def all_pairs_shortest_distances(net: Network) -> np.ndarray:
    """``n x n`` int64 matrix; unreachable pairs hold :data:`segroute.INF`."""
    r = router(net)
    if not _accel.HAVE_NUMBA:
        return _accel.apsp_numpy(r.tail, r.head, r.weight, net.n)
    if net.n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return np.vstack([r.dist_from(u) for u in range(net.n)])


def forwarding_graph(net: Network, u: int, v: int) -> ForwardingGraph:
    return router(net).forwarding_graph(u, v)


def is_ecmp_free(fg: ForwardingGraph) -> bool:
    """True iff the forwarding graph is one simple source-target path."""
    if fg.source == fg.target:
        return True
    succ = {}
    for a, b in fg.arcs:
        if a in succ:
            return False
        succ[a] = b
    x, steps = fg.source, 0
    while x != fg.target:
        if x not in succ or steps > len(fg.arcs):
            return False
        x = succ[x]
        steps += 1
    return steps == len(fg.arcs)


class LoadMap:
    """Exact rational load per capacity unit (edge, or arc in directed/bidirected mode)."""

    def __init__(self, net: Network, values=None):
        self.net = net
        self._v = [Fraction(0)] * len(net.units)
        if values is not None:
            for i, x in enumerate(values):
                self._v[i] = Fraction(x)

    def _unit(self, u, v) -> int:
        try:
            return self.net.unit_index[(u, v)]
        except KeyError:
            raise KeyError(f"no edge/arc ({u},{v}) in the network") from None

    def __getitem__(self, key) -> Fraction:
        return self._v[self._unit(*key)]

    def add_unit(self, unit: int, amount) -> None:
        self._v[unit] += amount

    def by_unit(self) -> list[Fraction]:
        return list(self._v)

    def items(self):
        """``((u, v), load)`` pairs in capacity-unit order."""
        for (u, v, _c), x in zip(self.net.units, self._v):
            yield (u, v), x

    def __add__(self, other: LoadMap) -> LoadMap:
        if other.net != self.net:
            raise ValueError("load maps belong to different networks")
        return LoadMap(self.net, [a + b for a, b in zip(self._v, other._v)])

    def __eq__(self, other):
        return isinstance(other, LoadMap) and other.net == self.net and other._v == self._v

    def __repr__(self):
        nz = {k: str(v) for k, v in self.items() if v}
        return f"LoadMap({nz})"

    def max_utilization(self) -> Fraction:
        return max((x / c for (_u, _v, c), x in zip(self.net.units, self._v)), default=Fraction(0))

    def first_overload(self):
        """Index of the first unit whose load exceeds its capacity, or ``None``."""
        for i, ((_u, _v, c), x) in enumerate(zip(self.net.units, self._v)):
            if x > c:
                return i
        return None

    def to_text(self) -> str:
        return "".join(
            f"load {u} {v} {x.numerator}/{x.denominator}\n" for (u, v), x in self.items()
        )


def segment_unit_loads(net: Network, stops, demand=None) -> dict[int, Fraction]:
    """Per-unit load of one unit of flow along a stop sequence."""
    r = router(net)
    acc: dict[int, Fraction] = defaultdict(Fraction)
    for a, b in zip(stops[:-1], stops[1:]):
        try:
            fg = r.forwarding_graph(a, b)
        except UnreachableError:
            raise UnreachableError(a, b, demand) from None
        for unit, f in fg.unit_loads:
            acc[unit] += f
    return acc


def scheme_loads(net: Network, demands, scheme: RoutingScheme) -> LoadMap:
    loads = LoadMap(net)
    for path in scheme.paths:
        b = demands[path.demand_index].b
        for unit, f in segment_unit_loads(net, path.stops, path.demand_index).items():
            loads.add_unit(unit, b * f)
    return loads


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`check_feasible`.

    ``status`` is ``feasible``, ``infeasible`` (``edge`` names the first
    overloaded edge/arc) or ``budget-violated`` (``demand`` names the first
    demand using more than ``k`` waypoints).
    """

    status: str
    loads: LoadMap | None = None
    edge: tuple[int, int] | None = None
    demand: int | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def describe(self) -> str:
        if self.status == "feasible":
            return "feasible"
        if self.status == "budget-violated":
            return f"budget-violated demand {self.demand}"
        u, v = self.edge
        return f"infeasible edge {u} {v} load {self.loads[(u, v)]} capacity {self._cap()}"

    def _cap(self):
        idx = self.loads.net.unit_index[self.edge]
        return self.loads.net.units[idx][2]


def check_feasible(inst: Instance, scheme: RoutingScheme) -> Verdict:
    validate_scheme(inst, scheme)
    for p in scheme.paths:
        if p.n_waypoints > inst.k:
            return Verdict("budget-violated", demand=p.demand_index)
    loads = scheme_loads(inst.network, inst.demands, scheme)
    bad = loads.first_overload()
    if bad is not None:
        u, v, _c = inst.network.units[bad]
        return Verdict("infeasible", loads, edge=(u, v))
    return Verdict("feasible", loads)
