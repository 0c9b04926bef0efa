"""Graph gadgets and a small named-vertex instance builder."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import networkx as nx

from ..model import Demand, Instance, Network


def extend_graph(g: nx.Graph, ell: int) -> nx.Graph:
    """Replace every edge (arc) by a path of ``ell`` edges (arcs).

    Original vertices keep their labels; the ``ell - 1`` new vertices on the
    path replacing ``(u, v)`` are labelled ``("sub", u, v, i)`` for
    ``i = 1..ell-1`` counted from ``u``.
    """
    if ell < 1:
        raise ValueError("extension length must be at least 1")
    out = g.__class__()
    out.add_nodes_from(g.nodes)
    for u, v in g.edges:
        chain = [u] + [("sub", u, v, i) for i in range(1, ell)] + [v]
        nx.add_path(out, chain)
    return out


def triangle_chain(ell: int) -> tuple[nx.Graph, tuple[int, int]]:
    """``ell`` triangles glued in a row; returns the graph and its two end vertices.

    Vertices are ``0..2*ell``. Triangle ``i`` (0-based) is ``(2i, 2i+1, 2i+2)``
    with top edge ``(2i, 2i+2)`` and bottom vertex ``2i+1``. ``ell = 0`` gives a
    single vertex.
    """
    if ell < 0:
        raise ValueError("chain length must be non-negative")
    g = nx.Graph()
    g.add_node(0)
    for i in range(ell):
        a, m, b = 2 * i, 2 * i + 1, 2 * i + 2
        g.add_edges_from([(a, b), (a, m), (m, b)])
    return g, (0, 2 * ell)


def chain_bottoms(ell: int) -> list[int]:
    return [2 * i + 1 for i in range(ell)]


@dataclass
class Builder:
    """Accumulates named vertices, edges and demands, then freezes into an Instance."""

    mode: str = "undirected"
    names: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)
    demands: list = field(default_factory=list)
    roles: list = field(default_factory=list)
    groups: dict = field(default_factory=lambda: defaultdict(list))

    def vertex(self, name) -> int:
        if name in self.index:
            return self.index[name]
        self.index[name] = len(self.names)
        self.names.append(name)
        return self.index[name]

    def __getitem__(self, name) -> int:
        return self.index[name]

    def edge(self, a, b, weight=1, capacity=1) -> None:
        self.edges.append((self.vertex(a), self.vertex(b), weight, capacity))

    def path(self, names, weight=1, capacity=1, shared=False) -> None:
        """Add consecutive edges; with ``shared`` an edge already present is reused."""
        for a, b in zip(names[:-1], names[1:]):
            if shared and self.has_edge(a, b):
                continue
            self.edge(a, b, weight, capacity)

    def has_edge(self, a, b) -> bool:
        if a not in self.index or b not in self.index:
            return False
        u, v = self.index[a], self.index[b]
        keys = {(u, v)} if self.mode == "directed" else {(u, v), (v, u)}
        return any((e[0], e[1]) in keys for e in self.edges)

    def graph(self, g: nx.Graph, tag, weight=1, capacity=1) -> None:
        """Copy ``g`` in, naming its vertices ``(tag, v)``."""
        for v in g.nodes:
            self.vertex((tag, v))
        for u, v in g.edges:
            self.edge((tag, u), (tag, v), weight, capacity)

    def demand(self, s, t, b=1, role="") -> int:
        self.demands.append(Demand(self.vertex(s), self.vertex(t), b))
        self.roles.append(role)
        return len(self.demands) - 1

    def build(self, k: int) -> Instance:
        net = Network(self.mode, len(self.names), tuple(self.edges))
        return Instance(net, tuple(self.demands), k)


def name_str(name) -> str:
    if isinstance(name, tuple):
        return "(" + ",".join(name_str(x) for x in name) + ")"
    return str(name)
