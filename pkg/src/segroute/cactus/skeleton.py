"""Cactus recognition and the block/hinge skeleton tree."""
from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from ..model import Network


class NotCactusError(ValueError):
    pass


class DisconnectedError(ValueError):
    pass


def to_nx(net: Network) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(net.n))
    g.add_edges_from((u, v) for u, v, _w, _c in net.edges)
    return g


def _blocks(g: nx.Graph):
    """Biconnected components as edge lists; raises if one is neither an edge nor a cycle."""
    out = []
    for comp in nx.biconnected_component_edges(g):
        comp = [tuple(sorted(e)) for e in comp]
        verts = {x for e in comp for x in e}
        if len(comp) > 1 and len(comp) != len(verts):
            raise NotCactusError(f"block on vertices {sorted(verts)} is neither an edge nor a cycle")
        out.append(comp)
    return out


def is_cactus(net: Network) -> bool:
    """True iff every biconnected component is a single edge or a simple cycle.

    Requires an undirected, connected network.
    """
    if net.mode != "undirected":
        raise ValueError("cactus recognition is defined for undirected networks")
    g = to_nx(net)
    if net.n > 0 and not nx.is_connected(g):
        raise DisconnectedError("graph is disconnected; split it into components first")
    try:
        _blocks(g)
    except NotCactusError:
        return False
    return True


def is_cactus_forest(net: Network) -> bool:
    """True iff every connected component is a cactus (undirected networks only)."""
    if net.mode != "undirected":
        return False
    try:
        _blocks(to_nx(net))
    except NotCactusError:
        return False
    return True


@dataclass
class Block:
    id: int
    kind: str  # "cycle" | "graft"
    vertices: tuple[int, ...]  # ring order for cycles, sorted for grafts
    edges: tuple[tuple[int, int], ...]


@dataclass
class Skeleton:
    """Rooted skeleton tree.

    Node keys are ``("B", block_id)`` for blocks and ``("H", vertex)`` for hinges.
    """

    blocks: list[Block]
    hinges: list[int]  # hinge vertices, sorted
    root: tuple
    parent: dict = field(default_factory=dict)
    children: dict = field(default_factory=dict)
    depth: dict = field(default_factory=dict)
    vertex_kind: dict = field(default_factory=dict)  # vertex -> "C" | "G" | "H"
    home: dict = field(default_factory=dict)  # non-hinge vertex -> block id

    @property
    def cycles(self):
        return [b for b in self.blocks if b.kind == "cycle"]

    @property
    def grafts(self):
        return [b for b in self.blocks if b.kind == "graft"]

    def nodes(self):
        return list(self.parent)

    def blocks_of_hinge(self, h: int) -> list[int]:
        out = [n[1] for n in self.children.get(("H", h), [])]
        p = self.parent.get(("H", h))
        if p is not None:
            out.append(p[1])
        return sorted(out)

    def node_of(self, v: int):
        """Skeleton node a terminal vertex maps to."""
        if self.vertex_kind.get(v) == "H":
            return ("H", v)
        return ("B", self.home[v])

    def tree_path(self, a, b) -> list:
        """Skeleton nodes on the tree path from ``a`` to ``b`` (inclusive)."""
        left, right = [a], [b]
        x, y = a, b
        while self.depth[x] > self.depth[y]:
            x = self.parent[x]
            left.append(x)
        while self.depth[y] > self.depth[x]:
            y = self.parent[y]
            right.append(y)
        while x != y:
            x = self.parent[x]
            y = self.parent[y]
            left.append(x)
            right.append(y)
        right.pop()
        return left + right[::-1]

    def postorder(self) -> list:
        out, stack = [], [(self.root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                out.append(node)
                continue
            stack.append((node, True))
            for c in reversed(self.children.get(node, [])):
                stack.append((c, False))
        return out

    def dump(self) -> str:
        lines = []
        for b in self.blocks:
            lines.append(f"block {b.kind} {b.id} : {' '.join(map(str, b.vertices))}")
        for i, h in enumerate(self.hinges):
            lines.append(f"hinge {i} {h} : {' '.join(map(str, self.blocks_of_hinge(h)))}")
        lines.append(f"root block {self.root[1]}")
        return "\n".join(lines) + "\n"


def _ring(edges) -> tuple[int, ...]:
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    start = min(adj)
    ring = [start]
    prev, cur = start, min(adj[start])
    while cur != start:
        ring.append(cur)
        a, b = adj[cur]
        prev, cur = cur, (b if a == prev else a)
    return tuple(ring)


def build_skeleton(net: Network) -> Skeleton:
    """Classify vertices, form cycle and graft blocks, and root the block/hinge tree.

    The root is the block containing the lowest vertex index (ties broken by
    block order: cycles before grafts, then by smallest vertex).
    """
    if net.mode != "undirected":
        raise ValueError("skeletons are defined for undirected networks")
    g = to_nx(net)
    if net.n > 0 and not nx.is_connected(g):
        raise DisconnectedError("graph is disconnected; split it into components first")
    comps = _blocks(g)
    cycle_edges = [c for c in comps if len(c) > 1]
    bridges = [c[0] for c in comps if len(c) == 1]
    in_cycles: dict[int, int] = {}
    for c in cycle_edges:
        for x in {x for e in c for x in e}:
            in_cycles[x] = in_cycles.get(x, 0) + 1
    kind = {}
    for v in range(net.n):
        if v not in in_cycles:
            kind[v] = "G"
        elif g.degree(v) == 2 and in_cycles[v] == 1:
            kind[v] = "C"
        else:
            kind[v] = "H"
    # grafts: bridges glued together through G-vertices (hinges stay leaves of grafts)
    uf = nx.utils.UnionFind()
    for e in bridges:
        uf[e]
    by_gvertex: dict[int, list] = {}
    for e in bridges:
        for x in e:
            if kind[x] == "G":
                by_gvertex.setdefault(x, []).append(e)
    for es in by_gvertex.values():
        uf.union(*es)
    graft_groups: dict = {}
    for e in bridges:
        graft_groups.setdefault(uf[e], []).append(e)
    raw = []
    for c in cycle_edges:
        ring = _ring(c)
        raw.append(("cycle", ring, tuple(sorted(c))))
    for es in graft_groups.values():
        verts = tuple(sorted({x for e in es for x in e}))
        raw.append(("graft", verts, tuple(sorted(es))))
    if net.n > 0 and not raw:
        # no edges at all: a single isolated vertex forms a trivial graft
        raw.append(("graft", tuple(range(net.n)), ()))
    raw.sort(key=lambda r: (min(r[1]), 0 if r[0] == "cycle" else 1, r[1]))
    blocks = [Block(i, k, verts, es) for i, (k, verts, es) in enumerate(raw)]
    hinges = sorted(v for v in range(net.n) if kind[v] == "H")
    home = {}
    adj: dict = {}
    for b in blocks:
        bn = ("B", b.id)
        adj.setdefault(bn, [])
        for x in b.vertices:
            if kind[x] == "H":
                adj[bn].append(("H", x))
                adj.setdefault(("H", x), []).append(bn)
            else:
                home[x] = b.id
    skel = Skeleton(blocks, hinges, ("B", 0) if blocks else None, vertex_kind=kind, home=home)
    if not blocks:
        return skel
    skel.parent[skel.root] = None
    skel.depth[skel.root] = 0
    order = [skel.root]
    for node in order:
        kids = []
        for nb in sorted(adj[node]):
            if nb == skel.parent[node]:
                continue
            if nb in skel.parent:
                raise NotCactusError("skeleton is not a tree")
            skel.parent[nb] = node
            skel.depth[nb] = skel.depth[node] + 1
            kids.append(nb)
            order.append(nb)
        skel.children[node] = kids
    return skel
