"""Reduction generators from six hard source problems, with forward solution lifters.

Each ``reduce_*`` returns a :class:`ReductionOutput` whose annotations map
source objects (vertices, edges, items, elements, gadget parts) to the
constructed vertices and demands. Each ``lift_*`` turns a valid source
solution into the routing scheme the construction was designed for.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from ..model import Instance, RoutingScheme
from .gadgets import Builder, chain_bottoms, extend_graph, name_str, triangle_chain
from .sources import (
    EC3,
    EDP2,
    MCC,
    BinPacking,
    D1SP2,
    InvalidSource,
    ThreePartition,
    is_proper_coloring,
    is_valid_packing,
    is_valid_partition,
)

SUBPATH_LEN = 16  # length of the spacer subpaths between color overlaps (fixed by the construction)


@dataclass
class ReductionOutput:
    instance: Instance
    annotations: dict
    names: list  # vertex index -> structured name
    roles: list  # demand index -> role label
    source: object = None
    meta: dict = field(default_factory=dict)

    def vertex(self, name) -> int:
        return self.names.index(name)

    def map_lines(self) -> list[str]:
        """Annotation lines in the ``# map <source-object> -> <targets>`` form."""
        out = []
        for key, val in self.annotations.items():
            if isinstance(val, (list, tuple)):
                tgt = " ".join(map(str, val))
            else:
                tgt = str(val)
            out.append(f"map {key} -> {tgt}")
        for i, role in enumerate(self.roles):
            out.append(f"map demand:{role} -> demand {i}")
        for v, name in enumerate(self.names):
            out.append(f"map name:{name_str(name)} -> {v}")
        for key, val in self.meta.items():
            out.append(f"meta {key} {val}")
        return out


def _finish(b: Builder, k: int, annotations: dict, src, **meta) -> ReductionOutput:
    return ReductionOutput(b.build(k), annotations, list(b.names), list(b.roles), src, meta)


def _scheme_from_names(red: ReductionOutput, waypoint_names) -> RoutingScheme:
    idx = {name: i for i, name in enumerate(red.names)}
    wps = [tuple(idx[w] for w in ws) for ws in waypoint_names]
    return RoutingScheme.from_waypoints(red.instance.demands, wps)


# ---------------------------------------------------------------------------
# two arc-disjoint paths (directed)


def reduce_2edp(src: EDP2) -> ReductionOutput:
    """Arc-subdivided digraph plus a saturated shortcut ``s3 -> t3``; budget ``|V|``."""
    src.validate()
    g2 = extend_graph(src.graph(), 2)
    b = Builder("directed")
    for v in range(src.n):
        b.vertex(("v", v))
    for u, v in src.arcs:
        b.vertex(("mid", u, v))

    def nm(x):
        return ("mid", x[1], x[2]) if isinstance(x, tuple) else ("v", x)

    for u, v in g2.edges:
        b.edge(nm(u), nm(v))
    b.vertex("s3")
    b.vertex("t3")
    for v in range(src.n):
        b.edge(("v", v), "s3")
    b.edge("t3", ("v", src.t1))
    if src.t2 != src.t1:
        b.edge("t3", ("v", src.t2))
    b.edge("s3", "t3")
    b.demand(("v", src.s1), ("v", src.t1), role="path1")
    b.demand(("v", src.s2), ("v", src.t2), role="path2")
    b.demand("s3", "t3", role="shortcut")
    ann = {f"vertex:{v}": [b[("v", v)]] for v in range(src.n)}
    ann.update({f"arc:{u}-{v}": [b[("mid", u, v)]] for u, v in src.arcs})
    return _finish(b, src.n, ann, src)


def lift_2edp(src: EDP2, solution, red: ReductionOutput) -> RoutingScheme:
    p1, p2 = solution
    arcs = set(src.arcs)
    for p, (s, t) in ((p1, (src.s1, src.t1)), (p2, (src.s2, src.t2))):
        if p[0] != s or p[-1] != t or any((a, c) not in arcs for a, c in zip(p[:-1], p[1:])):
            raise InvalidSource("not a valid path pair")
    e1 = set(zip(p1[:-1], p1[1:]))
    if e1 & set(zip(p2[:-1], p2[1:])):
        raise InvalidSource("paths share an arc")
    mids = lambda p: [("mid", a, c) for a, c in zip(p[:-1], p[1:])]
    return _scheme_from_names(red, [mids(p1), mids(p2), []])


# ---------------------------------------------------------------------------
# two disjoint paths, one shortest (undirected)


def reduce_2d1sp(src: D1SP2) -> ReductionOutput:
    """Extended graph, a long triangle chain, a shortcut path and a second chain; budget ``n``."""
    src.validate()
    g = src.graph()
    n = src.n
    k = n
    ext = n + 2
    dist = nx.shortest_path_length(g, src.s1, src.t1)
    b = Builder("undirected")
    for v in range(n):
        b.vertex(("v", v))
    for u, v in src.edges:
        chain = [("v", u)] + [("x", u, v, i) for i in range(1, ext)] + [("v", v)]
        b.path(chain)
    big, (l0, l1) = triangle_chain(2 * k)
    b.graph(big, "L")
    for name in ("s3", "s4"):
        b.edge(name, ("L", l0))
    for name in ("s3'", "s4'"):
        b.edge(("L", l1), name)
    short = [("q", i) for i in range(n)]
    b.path(["s3'"] + short + ["t3"])
    # the shortcut vertex next to s3' joins t1: a detour s4' -> t1 -> shortcut
    # is then strictly longer than the shortcut itself, so chain-a stays ECMP-free
    attach = [src.t1] + [v for v in range(n) if v != src.t1]
    for q, v in zip(short, attach):
        b.edge(q, ("v", v))
    small, (r0, r1) = triangle_chain(k - dist)
    b.graph(small, "R")
    b.edge(("v", src.t1), ("R", r0))
    b.edge("s4'", ("R", r0))
    b.edge(("R", r1), "t1'")
    b.edge(("R", r1), "t4")
    b.demand(("v", src.s1), "t1'", role="shortest")
    b.demand(("v", src.s2), ("v", src.t2), role="disjoint")
    b.demand("s3", "t3", role="chain-a")
    b.demand("s4", "t4", role="chain-b")
    ann = {f"vertex:{v}": [b[("v", v)]] for v in range(n)}
    ann["chain:long"] = [b[("L", x)] for x in sorted(big.nodes)]
    ann["chain:short"] = [b[("R", x)] for x in sorted(small.nodes)]
    ann["shortcut"] = [b[q] for q in short]
    return _finish(
        b, k, ann, src, extension=ext, long_chain=2 * k, short_chain=k - dist, distance=dist
    )


def _middle(src_edges, a, c, ext):
    """Middle vertex of the extended edge traversed from a to c (nearer a when ambiguous)."""
    off = ext // 2
    if (a, c) in src_edges:
        return ("x", a, c, off)
    return ("x", c, a, ext - off)


def lift_2d1sp(src: D1SP2, solution, red: ReductionOutput) -> RoutingScheme:
    p1, p2 = solution
    g = src.graph()
    for p, (s, t) in ((p1, (src.s1, src.t1)), (p2, (src.s2, src.t2))):
        if p[0] != s or p[-1] != t or any(not g.has_edge(a, c) for a, c in zip(p[:-1], p[1:])):
            raise InvalidSource("not a valid path pair")
    if len(p1) - 1 != nx.shortest_path_length(g, src.s1, src.t1):
        raise InvalidSource("first path is not shortest")
    e = lambda p: {frozenset(x) for x in zip(p[:-1], p[1:])}
    if e(p1) & e(p2):
        raise InvalidSource("paths share an edge")
    k = src.n
    ext = red.meta["extension"]
    edges = set(src.edges)
    mids = lambda p: [_middle(edges, a, c, ext) for a, c in zip(p[:-1], p[1:])]
    big = chain_bottoms(2 * k)
    small = chain_bottoms(red.meta["short_chain"])
    return _scheme_from_names(
        red,
        [
            mids(p1) + [("R", x) for x in small],
            mids(p2),
            [("L", x) for x in big[:k]],
            [("L", x) for x in big[k:]],
        ],
    )


# ---------------------------------------------------------------------------
# multicolored clique


def pad_mcc(src: MCC) -> tuple[MCC, dict]:
    """Equalise colour classes (isolated fillers) and make the colour count even."""
    src.validate()
    n_per = max(2, max((src.colors.count(c) for c in range(1, src.d + 1)), default=0))
    colors = list(src.colors)
    edges = list(src.edges)
    nv = src.n
    added = {"fillers": [], "extra_color": None}
    for c in range(1, src.d + 1):
        while colors.count(c) < n_per:
            colors.append(c)
            added["fillers"].append(nv)
            nv += 1
    d = src.d
    if d % 2:
        d += 1
        hub = nv
        original = list(range(nv))
        for _ in range(n_per):
            colors.append(d)
            nv += 1
        edges += [(v, hub) for v in original]
        added["extra_color"] = {"color": d, "hub": hub, "vertices": list(range(hub, nv))}
    return MCC(nv, tuple(edges), d, tuple(colors)), added


def reduce_mcc(src: MCC, mode: str = "undirected") -> ReductionOutput:
    """Grid of horizontal/vertical vertex paths with merged crossings, shortcuts and blockers; k = 1."""
    if mode not in ("undirected", "bidirected"):
        raise ValueError("the clique construction supports undirected and bidirected modes")
    padded, added = pad_mcc(src)
    d = padded.d
    order = sorted(range(padded.n), key=lambda v: (padded.colors[v], v))
    n_per = len(order) // d
    classes = [[v for v in order if padded.colors[v] == c] for c in range(1, d + 1)]
    adj = {frozenset(e) for e in padded.edges}
    sep = 2 * (3 * n_per * d + (d - 1) * SUBPATH_LEN)
    b = Builder(mode)

    def conflict(u, v):
        return u != v and (padded.colors[u] == padded.colors[v] or frozenset((u, v)) not in adj)

    # crossing cells: P_v meets Q_u in 3 edges a-x-y-b (horizontal) and c-x'-y'-e (vertical);
    # the middle edges coincide when u and v cannot share a clique
    def cell(v, u):
        h = [("P", v, u, i) for i in range(4)]
        if conflict(u, v):
            vert = [("Q", u, v, 0), h[1], h[2], ("Q", u, v, 3)]
        else:
            vert = [("Q", u, v, i) for i in range(4)]
        return h, vert

    cells = {(v, u): cell(v, u) for v in order for u in order}

    lengths = {}
    middles = {}
    for horizontal in (True, False):
        for v in order:
            seq = _line_sequence(v, horizontal, padded, classes, cells, sep, d)
            b.path(seq, shared=True)
            lengths[("P" if horizontal else "Q", v)] = len(seq) - 1
            middles[("P" if horizontal else "Q", v)] = seq[(len(seq) - 1) // 2]
    # shortcuts of three edges, each with a blocker on its middle edge
    pairs = []
    for i in range(1, d + 1):
        pairs.append((("s", i), ("t", i), "facing"))
        pairs.append((("s", d + i), ("t", d + i), "facing"))
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            pairs.append((("s", i), ("s", j), "side"))
            pairs.append((("t", i), ("t", j), "side"))
            pairs.append((("s", d + i), ("s", d + j), "side"))
            pairs.append((("t", d + i), ("t", d + j), "side"))
    for i in range(1, d + 1):
        b.demand(("s", i), ("t", i), role=f"row{i}")
    for i in range(1, d + 1):
        b.demand(("s", d + i), ("t", d + i), role=f"col{i}")
    for a, c, kind in pairs:
        m1, m2 = ("sc", a, c, 1), ("sc", a, c, 2)
        b.path([a, m1, m2, c])
        b.demand(m1, m2, role=f"blocker:{name_str(a)}-{name_str(c)}")
        if mode == "bidirected" and kind == "side":
            b.demand(m2, m1, role=f"blocker:{name_str(c)}-{name_str(a)}")
    ann = {}
    for v in order:
        ann[f"vertex:{v}"] = [b[middles[("P", v)]], b[middles[("Q", v)]]]
    if added["fillers"]:
        ann["padding:fillers"] = added["fillers"]
    if added["extra_color"]:
        ann["padding:extra-color"] = [added["extra_color"]["color"]] + added["extra_color"]["vertices"]
    return _finish(
        b,
        1,
        ann,
        src,
        colors=d,
        class_size=n_per,
        separator=sep,
        subpath=SUBPATH_LEN,
        line_length=2 * sep + 3 * n_per * d + (d - 1) * SUBPATH_LEN,
        padded=padded,
        lengths=lengths,
        middles=middles,
    )


def _line_sequence(v, horizontal, padded, classes, cells, sep, d):
    """Vertex names along P_v (horizontal) or Q_v (vertical), terminal to terminal."""
    col = padded.colors[v]
    tag = "P" if horizontal else "Q"
    start = ("s", col) if horizontal else ("s", d + col)
    end = ("t", col) if horizontal else ("t", d + col)
    seq = [start] + [("sepA", tag, v, i) for i in range(1, sep)]
    for ci, cls in enumerate(classes):
        if ci:
            seq += [("gap", tag, v, ci, i) for i in range(1, SUBPATH_LEN)]
        for u in cls:
            pts = cells[(v, u)][0] if horizontal else cells[(u, v)][1]
            seq += list(pts)
    seq += [("sepB", tag, v, i) for i in range(1, sep)] + [end]
    # consecutive cells are joined by one edge; with 3 edges per cell and the
    # joining edges the overlap spans 3n edges when cell ends are shared
    return _glue(seq)


def _glue(seq):
    """Identify the end of each cell with the start of the next (3 edges per crossing)."""
    out = []
    for x in seq:
        if out and _is_cell_start(x) and _is_cell_end(out[-1]):
            continue  # shared junction vertex
        out.append(x)
    return out


def _is_cell_start(x):
    return isinstance(x, tuple) and x[0] in ("P", "Q") and x[3] == 0


def _is_cell_end(x):
    return isinstance(x, tuple) and x[0] in ("P", "Q") and x[3] == 3


def lift_mcc(src: MCC, clique, red: ReductionOutput) -> RoutingScheme:
    """Clique ``v_1..v_d`` (one per colour) -> each row/column demand pinned at its line's middle."""
    padded = red.meta["padded"]
    g = padded.graph()
    clique = list(clique)
    if len(clique) != src.d or sorted(src.colors[v] for v in clique) != list(range(1, src.d + 1)):
        raise InvalidSource("need exactly one vertex of each colour")
    if any(not g.has_edge(a, c) for i, a in enumerate(clique) for c in clique[i + 1 :]):
        raise InvalidSource("vertices are not pairwise adjacent")
    if padded.d > src.d:
        extra = [v for v in range(padded.n) if padded.colors[v] == padded.d]
        hub = [v for v in extra if all(g.has_edge(v, x) for x in clique)]
        clique.append(hub[0])
    by_color = {padded.colors[v]: v for v in clique}
    middles = red.meta["middles"]
    wps = []
    for role in red.roles:
        if role.startswith("row"):
            wps.append([middles[("P", by_color[int(role[3:])])]])
        elif role.startswith("col"):
            wps.append([middles[("Q", by_color[int(role[3:])])]])
        else:
            wps.append([])
    return _scheme_from_names(red, wps)


# ---------------------------------------------------------------------------
# 3-edge-colouring


COLOR_NAMES = ("r", "g", "b")


def reduce_3ec(src: EC3) -> ReductionOutput:
    """Complete bipartite graph between V and four colour vertices; k = 1."""
    src.validate()
    b = Builder("undirected")
    for v in range(src.n):
        b.vertex(("v", v))
    colors = [("x", c) for c in COLOR_NAMES + ("d",)]
    for x in colors:
        b.vertex(x)
    for v in range(src.n):
        for x in colors:
            b.edge(("v", v), x)
    for u, v in src.edges:
        b.demand(("v", u), ("v", v), role=f"edge:{u}-{v}")
    for v in range(src.n):
        b.demand(("x", "d"), ("v", v), role=f"dummy:{v}")
    ann = {f"vertex:{v}": [b[("v", v)]] for v in range(src.n)}
    ann.update({f"color:{c}": [b[("x", c)]] for c in COLOR_NAMES + ("d",)})
    ann["vertex-cover"] = [b[x] for x in colors]
    return _finish(b, 1, ann, src, vertex_cover=4)


def lift_3ec(src: EC3, coloring, red: ReductionOutput) -> RoutingScheme:
    """Colouring as a tuple of 0/1/2 per edge (edge order of the source)."""
    if not is_proper_coloring(src, coloring):
        raise InvalidSource("not a proper 3-edge-colouring")
    wps = [[("x", COLOR_NAMES[c])] for c in coloring] + [[] for _ in range(src.n)]
    return _scheme_from_names(red, wps)


# ---------------------------------------------------------------------------
# bin packing


def reduce_binpacking(src: BinPacking, mode: str = "undirected") -> ReductionOutput:
    """Bins as two-edge detours between s and t next to a direct s-t edge; all capacities C; k = 1."""
    src.validate()
    b = Builder(mode)
    b.vertex("s")
    b.vertex("t")
    for j in range(src.bins):
        b.vertex(("B", j))
    for j in range(src.bins):
        b.edge("s", ("B", j), 1, src.capacity)
        b.edge(("B", j), "t", 1, src.capacity)
    b.edge("s", "t", 1, src.capacity)
    for i, a in enumerate(src.items):
        b.demand("s", "t", a, role=f"item:{i}")
    b.demand("s", "t", src.capacity, role="dummy")
    ann = {f"bin:{j}": [b[("B", j)]] for j in range(src.bins)}
    ann["vertex-cover"] = [b["s"], b["t"]]
    return _finish(b, 1, ann, src, vertex_cover=2)


def lift_binpacking(src: BinPacking, assignment, red: ReductionOutput) -> RoutingScheme:
    """Assignment item -> bin index."""
    if not is_valid_packing(src, assignment):
        raise InvalidSource("not a valid packing")
    wps = [[("B", j)] for j in assignment] + [[]]
    return _scheme_from_names(red, wps)


# ---------------------------------------------------------------------------
# 3-partition on a chain of triangles


def reduce_3partition(src: ThreePartition, mode: str = "undirected") -> ReductionOutput:
    """Triangles joined by single edges; top edges (l-1)B, bottom edges B, connectors lB; k = 1."""
    if mode not in ("undirected", "bidirected"):
        raise ValueError("the triangle-chain construction supports undirected and bidirected modes")
    src.validate()
    ell, B = src.groups, src.bound
    b = Builder(mode)
    for j in range(ell):
        x, m, y = ("x", j), ("m", j), ("y", j)
        if ell > 1:
            # with one group the top edge would have capacity 0; leaving it out keeps the verdict
            b.edge(x, y, 1, (ell - 1) * B)
        b.edge(x, m, 1, B)
        b.edge(m, y, 1, B)
        if j + 1 < ell:
            b.edge(y, ("x", j + 1), 1, ell * B)
    for i, a in enumerate(src.values):
        b.demand(("x", 0), ("y", ell - 1), a, role=f"element:{i}")
    ann = {f"group:{j}": [b[("m", j)]] for j in range(ell)}
    return _finish(b, 1, ann, src)


def lift_3partition(src: ThreePartition, assignment, red: ReductionOutput) -> RoutingScheme:
    """Assignment element -> group index."""
    if not is_valid_partition(src, assignment):
        raise InvalidSource("not a valid 3-partition")
    return _scheme_from_names(red, [[("m", j)] for j in assignment])


# ---------------------------------------------------------------------------


_LIFTERS = {
    EDP2: lift_2edp,
    D1SP2: lift_2d1sp,
    MCC: lift_mcc,
    EC3: lift_3ec,
    BinPacking: lift_binpacking,
    ThreePartition: lift_3partition,
}


def lift_solution(src, source_solution, red: ReductionOutput) -> RoutingScheme:
    """Dispatch to the lifter matching the source problem type."""
    try:
        fn = _LIFTERS[type(src)]
    except KeyError:
        raise TypeError(f"no lifter for {type(src).__name__}") from None
    return fn(src, source_solution, red)
