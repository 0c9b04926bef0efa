"""Bottom-up dynamic programme for unit segment routing on cacti.

Every shortest path between two vertices of a cactus crosses the blocks of the
skeleton tree path between them, entering and leaving each block through its
hinges. Inside a graft the route is forced; inside a cycle the demand's local
behaviour is one of the minimal solutions of the single-cycle problem, and the
waypoints spent in different blocks add up. The programme therefore keeps, for
each skeleton subtree, the Pareto frontier of waypoint costs of the demands
that leave the subtree (at most two, otherwise the instance is infeasible).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import networkx as nx

from ..model import Instance, Network, RoutingScheme
from ..routing import check_feasible
from ..solvers import SolveResult
from .cycle import solve_cycle_min
from .skeleton import NotCactusError, Skeleton, build_skeleton, to_nx

INF = float("inf")


class NotUnitError(ValueError):
    pass


# ---------------------------------------------------------------------------
# demand projection onto the skeleton


@dataclass
class Route:
    """Skeleton footprint of one demand."""

    demand: int
    nodes: list  # skeleton tree path
    crossings: dict  # block id -> (entry, exit)
    through: frozenset = frozenset()  # hinges strictly inside the path

    def visits(self, node) -> bool:
        """A block is visited when crossed, a hinge when the path passes through it."""
        if node[0] == "H":
            return node in self.through
        return node[1] in self.crossings


def project_demands(skel: Skeleton, demands) -> list[Route]:
    out = []
    for i, (s, t) in enumerate(demands):
        path = skel.tree_path(skel.node_of(s), skel.node_of(t))
        crossings = {}
        for j, node in enumerate(path):
            if node[0] != "B":
                continue
            entry = s if j == 0 else path[j - 1][1]
            exit_ = t if j == len(path) - 1 else path[j + 1][1]
            crossings[node[1]] = (entry, exit_)
        through = frozenset(x for x in path[1:-1] if x[0] == "H")
        out.append(Route(i, path, crossings, through))
    return out


# ---------------------------------------------------------------------------
# reduction rules


@dataclass
class RuleOutcome:
    """Result of applying the two reduction rules exhaustively.

    ``rejected`` names the offending node when a subtree has too many leaving
    demands. Otherwise ``pieces`` lists the independent sub-instances created
    by detaching subtrees without leaving demands: ``(root, nodes, demands)``
    with each piece rooted in a block.
    """

    leaving: dict
    rejected: tuple | None = None
    reason: str = ""
    pieces: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.rejected is None


def leaving_limit(skel: Skeleton, node) -> int:
    """At most one demand can leave through a graft, two through a cycle."""
    if node[0] == "B":
        return 1 if skel.blocks[node[1]].kind == "graft" else 2
    par = skel.parent[node]
    return 1 if skel.blocks[par[1]].kind == "graft" else 2


def compute_leaving(skel: Skeleton, routes) -> dict:
    acc: dict = {node: set() for node in skel.nodes()}
    for r in routes:
        for node in r.nodes:
            par = skel.parent[node]
            if par is not None and r.visits(node) and r.visits(par):
                acc[node].add(r.demand)
    return {node: frozenset(v) for node, v in acc.items()}


def apply_reduction_rules(skel: Skeleton, demands) -> RuleOutcome:
    routes = project_demands(skel, demands)
    leaving = compute_leaving(skel, routes)
    for node in skel.postorder():
        if skel.parent[node] is None:
            continue
        lim = leaving_limit(skel, node)
        if len(leaving[node]) > lim:
            return RuleOutcome(
                leaving, node, f"{len(leaving[node])} demands leave {node} (limit {lim})"
            )
    # detach every non-root subtree with no leaving demand
    cut = [n for n in skel.nodes() if skel.parent[n] is not None and not leaving[n]]
    cut_set = set(cut)
    pieces = []
    for top in [skel.root] + sorted(cut):
        nodes, stack = [], [top]
        while stack:
            x = stack.pop()
            nodes.append(x)
            stack.extend(c for c in skel.children.get(x, []) if c not in cut_set)
        blocks = {x[1] for x in nodes if x[0] == "B"}
        mine = sorted(r.demand for r in routes if r.crossings and set(r.crossings) <= blocks)
        root = top if top[0] == "B" else min((x for x in nodes if x[0] == "B"), default=top)
        if blocks:
            pieces.append((root, sorted(nodes), mine))
    return RuleOutcome(leaving, pieces=pieces)


# ---------------------------------------------------------------------------
# dependency multigraph


@dataclass
class DependencyMultigraph:
    node: tuple
    vertices: list  # parent (if any) followed by children
    edges: list  # (a, b, demand)
    components: list  # (kind, vertex list) with kind "path" | "cycle" | "isolated"

    def degree(self, v) -> int:
        return sum((a == v) + (b == v) for a, b, _ in self.edges)


def build_dependency_multigraph(skel: Skeleton, node, leaving: dict, routes=None) -> DependencyMultigraph:
    """Children of ``node`` (plus its parent) linked once per shared leaving demand."""
    kids = list(skel.children.get(node, []))
    par = skel.parent[node]
    verts = ([par] if par is not None else []) + kids
    edges = []
    for i, a in enumerate(kids):
        for b in kids[i + 1 :]:
            for dem in sorted(leaving[a] & leaving[b]):
                edges.append((a, b, dem))
    if par is not None:
        for a in kids:
            for dem in sorted(leaving[a] & leaving[node]):
                edges.append((a, par, dem))
    g = nx.MultiGraph()
    g.add_nodes_from(verts)
    g.add_edges_from((a, b) for a, b, _ in edges)
    for v in verts:
        if g.degree(v) > 2:
            raise AssertionError(f"dependency multigraph of {node} has degree {g.degree(v)} at {v}")
    comps = []
    for comp in sorted(nx.connected_components(g), key=lambda c: min(c)):
        sub = g.subgraph(comp)
        if sub.number_of_edges() == 0:
            comps.append(("isolated", sorted(comp)))
        elif sub.number_of_edges() == sub.number_of_nodes():
            comps.append(("cycle", sorted(comp)))
        else:
            comps.append(("path", sorted(comp)))
    return DependencyMultigraph(node, verts, edges, comps)


# ---------------------------------------------------------------------------
# Pareto factors


class Factor:
    """Pareto frontier of waypoint costs over a set of open demands.

    ``entries`` maps a cost tuple (aligned with ``vars``) to a provenance
    chain used to rebuild the chosen cycle solutions.
    """

    __slots__ = ("vars", "entries")

    def __init__(self, vars_, entries):
        self.vars = tuple(vars_)
        self.entries = entries

    def empty(self) -> bool:
        return not self.entries


def _pareto(entries: dict) -> dict:
    items = sorted(entries.items())
    kept = []
    for c, prov in items:
        if any(all(a <= b for a, b in zip(kc, c)) for kc, _ in kept):
            continue
        kept.append((c, prov))
    return dict(kept)


def _merge(f: Factor, g: Factor, k: int) -> Factor:
    vars_ = tuple(sorted(set(f.vars) | set(g.vars)))
    fi = [f.vars.index(v) if v in f.vars else -1 for v in vars_]
    gi = [g.vars.index(v) if v in g.vars else -1 for v in vars_]
    out = {}
    for cf, pf in f.entries.items():
        for cg, pg in g.entries.items():
            c = tuple(
                (cf[a] if a >= 0 else 0) + (cg[b] if b >= 0 else 0) for a, b in zip(fi, gi)
            )
            if any(x > k for x in c):
                continue
            if c not in out:
                out[c] = (pf, pg)
    return Factor(vars_, _pareto(out))


def _project(f: Factor, keep) -> Factor:
    vars_ = tuple(v for v in f.vars if v in keep)
    idx = [f.vars.index(v) for v in vars_]
    out = {}
    for c, prov in f.entries.items():
        key = tuple(c[i] for i in idx)
        if key not in out:
            out[key] = prov
    return Factor(vars_, _pareto(out))


@dataclass
class PartialSolution:
    """Budget tables for the demands leaving a skeleton subtree.

    With one leaving demand ``i``: ``tables[i]`` is the least number of
    waypoints ``i`` needs inside the subtree. With two (``i < j``):
    ``tables[i][x]`` is the least number ``j`` needs when ``i`` may use at most
    ``x`` (and symmetrically), ``inf`` when impossible.
    """

    node: tuple
    leaving: tuple
    tables: dict

    @classmethod
    def from_factor(cls, node, factor: Factor, k: int):
        vs = factor.vars
        if len(vs) == 0:
            return cls(node, (), {})
        if len(vs) == 1:
            best = min((c[0] for c in factor.entries), default=INF)
            return cls(node, vs, {vs[0]: best})
        i, j = vs
        ti = [min((c[1] for c in factor.entries if c[0] <= x), default=INF) for x in range(k + 1)]
        tj = [min((c[0] for c in factor.entries if c[1] <= x), default=INF) for x in range(k + 1)]
        return cls(node, vs, {i: ti, j: tj})


# ---------------------------------------------------------------------------
# the programme


def _graft_conflict(block, routes) -> bool:
    """True when two demands need the same graft edge."""
    if not block.edges:
        return False
    g = nx.Graph(list(block.edges))
    used = set()
    for r in routes:
        if block.id not in r.crossings:
            continue
        x, y = r.crossings[block.id]
        path = nx.shortest_path(g, x, y)
        for a, b in zip(path[:-1], path[1:]):
            e = (min(a, b), max(a, b))
            if e in used:
                return True
            used.add(e)
    return False


def _flatten(prov, out):
    stack = [prov]
    while stack:
        p = stack.pop()
        if p is None:
            continue
        if p[0] == "cyc":
            out.append(p)
        else:
            stack.extend(p)


@dataclass
class CactusRun:
    feasible: bool
    reason: str = ""
    scheme: RoutingScheme | None = None
    partials: dict = field(default_factory=dict)


def _solve_component(skel: Skeleton, demands, k: int, keep_partials=False) -> CactusRun:
    routes = project_demands(skel, demands)
    rules = apply_reduction_rules(skel, demands)
    if not rules.ok:
        return CactusRun(False, "leaving-demand limit exceeded at " + str(rules.rejected))
    leaving = rules.leaving
    by_block: dict[int, list] = {}
    for r in routes:
        for b in r.crossings:
            by_block.setdefault(b, []).append(r)
    factors: dict = {}
    partials = {}
    for node in skel.postorder():
        kids = skel.children.get(node, [])
        if node[0] == "H":
            build_dependency_multigraph(skel, node, leaving)
        local_opts = [({}, None)]
        if node[0] == "B":
            block = skel.blocks[node[1]]
            local = by_block.get(block.id, [])
            if block.kind == "graft":
                if _graft_conflict(block, local):
                    return CactusRun(False, f"graft {block.id} edge shared by two demands")
            elif local:
                verdict = solve_cycle_min(block.vertices, [r.crossings[block.id] for r in local])
                if not verdict.feasible:
                    return CactusRun(False, f"cycle {block.id} infeasible ({verdict.case})")
                local_opts = [
                    ({r.demand: c for r, c in zip(local, sol.costs)}, ("cyc", block.id, oi))
                    for oi, sol in enumerate(verdict.solutions)
                ]
        keep = leaving[node]
        result = {}
        vars_out = ()
        for costs, prov in local_opts:
            vars_ = tuple(sorted(costs))
            acc = Factor(vars_, {tuple(costs[v] for v in vars_): prov})
            if any(x > k for x in next(iter(acc.entries))):
                continue
            pending = list(kids)
            while True:
                needed = set(keep)
                for c in pending:
                    needed |= set(factors[c].vars)
                acc = _project(acc, needed)
                if acc.empty() or not pending:
                    break
                open_ = set(acc.vars)
                # follow the dependency chain: next child sharing the most open demands
                pending.sort(key=lambda c: (-len(open_ & set(factors[c].vars)), c))
                acc = _merge(acc, factors[pending.pop(0)], k)
            for c, p in acc.entries.items():
                result.setdefault(c, p)
            vars_out = acc.vars
        for c in kids:
            factors.pop(c, None)
        if not result:
            return CactusRun(False, f"no budget-respecting assignment at {node}")
        f = Factor(vars_out, _pareto(result))
        factors[node] = f
        if keep_partials:
            partials[node] = PartialSolution.from_factor(node, f, k)
    root = factors[skel.root]
    prov = next(iter(root.entries.values()))
    chosen = []
    _flatten(prov, chosen)
    picks = {blk: oi for _tag, blk, oi in chosen}
    waypoints = []
    for r in routes:
        wp = []
        for node in r.nodes:
            if node[0] != "B" or node[1] not in picks:
                continue
            block = skel.blocks[node[1]]
            local = by_block[block.id]
            verdict = solve_cycle_min(block.vertices, [q.crossings[block.id] for q in local])
            sol = verdict.solutions[picks[node[1]]]
            wp.extend(sol.waypoints[local.index(r)])
        waypoints.append(tuple(wp))
    return CactusRun(True, "", waypoints, partials)


def _check_unit_cactus_input(inst: Instance):
    net = inst.network
    if net.mode != "undirected":
        raise NotCactusError("the cactus solver handles undirected networks only")
    if not inst.is_unit():
        raise NotUnitError("the cactus solver requires unit weights, capacities and bandwidths")


def solve_unit_cactus(inst: Instance, keep_partials: bool = False) -> SolveResult:
    """Decide a unit instance on an undirected cactus (component-wise) and build a witness."""
    t0 = time.perf_counter()
    _check_unit_cactus_input(inst)
    net = inst.network
    g = to_nx(net)
    comps = sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: c[0])
    comp_of = {v: i for i, c in enumerate(comps) for v in c}
    skeletons = []
    for c in comps:
        # relabel to 0..|c|-1 so the skeleton code sees a connected network
        local = {v: i for i, v in enumerate(c)}
        edges = [(local[u], local[v], 1, 1) for u, v, _w, _c in net.edges if u in local]
        skel = build_skeleton(Network("undirected", len(c), tuple(edges)))
        skeletons.append((c, local, skel))
    per_comp: dict[int, list] = {}
    for i, dm in enumerate(inst.demands):
        if comp_of[dm.s] != comp_of[dm.t]:
            return SolveResult("no", None, 0, "cactus", f"demand {i} spans two components")
        per_comp.setdefault(comp_of[dm.s], []).append(i)
    waypoints = [()] * inst.d
    partials = {}
    for ci, idxs in sorted(per_comp.items()):
        c, local, skel = skeletons[ci]
        dem = [(local[inst.demands[i].s], local[inst.demands[i].t]) for i in idxs]
        run = _solve_component(skel, dem, inst.k, keep_partials)
        if not run.feasible:
            return SolveResult("no", None, len(skel.parent), "cactus", run.reason)
        for i, wp in zip(idxs, run.scheme):
            waypoints[i] = tuple(c[x] for x in wp)
        partials[ci] = run.partials
    scheme = RoutingScheme.from_waypoints(inst.demands, waypoints)
    explored = sum(len(s.parent) for _c, _l, s in skeletons)
    return SolveResult(
        "yes",
        scheme,
        explored,
        "cactus",
        stats={"partials": partials, "seconds": time.perf_counter() - t0},
    )


def verify_witness(inst: Instance, result: SolveResult) -> bool:
    return result.scheme is not None and check_feasible(inst, result.scheme).feasible
