"""Source problems of the hardness reductions, with capped exhaustive oracles.

Every oracle is a plain exhaustive search. Inputs beyond its cap raise
:class:`OracleUnavailable` instead of being silently truncated.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import networkx as nx

MAX_ORACLE_VERTICES = 8
MAX_ORACLE_ITEMS = 6
MAX_PARTITION_ELEMENTS = 9
MAX_COLORING_EDGES = 12


class OracleUnavailable(RuntimeError):
    """The input exceeds the exhaustive oracle's size cap."""


class InvalidSource(ValueError):
    pass


def _graph(n, edges, directed=False):
    g = nx.DiGraph() if directed else nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return g


@dataclass(frozen=True)
class EDP2:
    """Two arc-disjoint paths in a digraph on vertices ``0..n-1``."""

    n: int
    arcs: tuple
    s1: int
    t1: int
    s2: int
    t2: int

    def graph(self) -> nx.DiGraph:
        return _graph(self.n, self.arcs, directed=True)

    def validate(self):
        g = self.graph()
        if g.number_of_edges() != len(self.arcs) or any(u == v for u, v in self.arcs):
            raise InvalidSource("arcs must be distinct and loop-free")
        for x in (self.s1, self.t1, self.s2, self.t2):
            if not 0 <= x < self.n:
                raise InvalidSource("terminal out of range")
        if self.s1 == self.t1 or self.s2 == self.t2:
            raise InvalidSource("terminal pairs must be distinct")


@dataclass(frozen=True)
class D1SP2:
    """Edge-disjoint paths in an undirected graph, the first one shortest."""

    n: int
    edges: tuple
    s1: int
    t1: int
    s2: int
    t2: int

    def graph(self) -> nx.Graph:
        return _graph(self.n, self.edges)

    def validate(self):
        g = self.graph()
        if g.number_of_edges() != len(self.edges) or any(u == v for u, v in self.edges):
            raise InvalidSource("edges must be distinct and loop-free")
        if self.n == 0 or not nx.is_connected(g):
            raise InvalidSource("graph must be connected")
        if self.s1 == self.t1 or self.s2 == self.t2:
            raise InvalidSource("terminal pairs must be distinct")


@dataclass(frozen=True)
class MCC:
    """Multicolored clique: ``colors[v]`` in ``1..d``."""

    n: int
    edges: tuple
    d: int
    colors: tuple

    def graph(self) -> nx.Graph:
        return _graph(self.n, self.edges)

    def validate(self):
        if len(self.colors) != self.n:
            raise InvalidSource("one color per vertex required")
        if self.d < 1 or any(not 1 <= c <= self.d for c in self.colors):
            raise InvalidSource(f"colors must lie in 1..{self.d}")
        if any(u == v or not (0 <= u < self.n and 0 <= v < self.n) for u, v in self.edges):
            raise InvalidSource("bad edge")


@dataclass(frozen=True)
class EC3:
    """3-edge-colouring of an undirected graph."""

    n: int
    edges: tuple

    def graph(self) -> nx.Graph:
        return _graph(self.n, self.edges)

    def validate(self):
        g = self.graph()
        if g.number_of_edges() != len(self.edges) or any(u == v for u, v in self.edges):
            raise InvalidSource("edges must be distinct and loop-free")
        if self.n == 0 or not nx.is_connected(g):
            raise InvalidSource("graph must be connected")


@dataclass(frozen=True)
class BinPacking:
    items: tuple
    bins: int
    capacity: int

    def validate(self):
        if self.bins < 0 or self.capacity < 1 or any(a < 1 for a in self.items):
            raise InvalidSource("items and capacity must be positive, bins non-negative")


@dataclass(frozen=True)
class ThreePartition:
    values: tuple
    bound: int

    @property
    def groups(self) -> int:
        return len(self.values) // 3

    def validate(self):
        A, B = self.values, self.bound
        if len(A) % 3 or not A:
            raise InvalidSource("need a positive multiple of 3 elements")
        if sum(A) != self.groups * B:
            raise InvalidSource("elements must sum to groups * bound")
        if any(not (B < 4 * a and 2 * a < B) for a in A):
            raise InvalidSource("every element must lie strictly between B/4 and B/2")


# ---------------------------------------------------------------------------
# oracles: each returns one solution (or None) and can enumerate all


def _simple_paths(g, s, t):
    return [tuple(p) for p in nx.all_simple_paths(g, s, t)] if s != t else [(s,)]


def _edges_of(path, directed):
    pairs = zip(path[:-1], path[1:])
    return [(a, b) if directed else frozenset((a, b)) for a, b in pairs]


def edp2_solutions(src: EDP2):
    if src.n > MAX_ORACLE_VERTICES:
        raise OracleUnavailable(f"2-EDP oracle handles at most {MAX_ORACLE_VERTICES} vertices")
    g = src.graph()
    p1s = _simple_paths(g, src.s1, src.t1)
    p2s = _simple_paths(g, src.s2, src.t2)
    for p1 in p1s:
        e1 = set(_edges_of(p1, True))
        for p2 in p2s:
            if not e1 & set(_edges_of(p2, True)):
                yield p1, p2


def d1sp2_solutions(src: D1SP2):
    if src.n > MAX_ORACLE_VERTICES:
        raise OracleUnavailable(f"2D1SP oracle handles at most {MAX_ORACLE_VERTICES} vertices")
    g = src.graph()
    p1s = [tuple(p) for p in nx.all_shortest_paths(g, src.s1, src.t1)]
    p2s = _simple_paths(g, src.s2, src.t2)
    for p1 in p1s:
        e1 = set(_edges_of(p1, False))
        for p2 in p2s:
            if not e1 & set(_edges_of(p2, False)):
                yield p1, p2


def mcc_solutions(src: MCC):
    if src.n > MAX_ORACLE_VERTICES:
        raise OracleUnavailable(f"clique oracle handles at most {MAX_ORACLE_VERTICES} vertices")
    g = src.graph()
    classes = [[v for v in range(src.n) if src.colors[v] == c] for c in range(1, src.d + 1)]
    for pick in itertools.product(*classes):
        if all(g.has_edge(a, b) for a, b in itertools.combinations(pick, 2)):
            yield pick


def is_proper_coloring(src: EC3, coloring) -> bool:
    if len(coloring) != len(src.edges) or any(c not in (0, 1, 2) for c in coloring):
        return False
    seen = set()
    for (u, v), c in zip(src.edges, coloring):
        if (u, c) in seen or (v, c) in seen:
            return False
        seen.add((u, c))
        seen.add((v, c))
    return True


def ec3_solutions(src: EC3):
    """Proper colourings with colours 0, 1, 2 (one per edge, in edge order)."""
    if src.n > MAX_ORACLE_VERTICES or len(src.edges) > MAX_COLORING_EDGES:
        raise OracleUnavailable("edge-colouring oracle input too large")
    m = len(src.edges)
    coloring = [0] * m
    used: dict = {}

    def rec(i):
        if i == m:
            yield tuple(coloring)
            return
        u, v = src.edges[i]
        for c in range(3):
            if (u, c) in used or (v, c) in used:
                continue
            used[(u, c)] = used[(v, c)] = True
            coloring[i] = c
            yield from rec(i + 1)
            del used[(u, c)], used[(v, c)]

    yield from rec(0)


def is_valid_packing(src: BinPacking, assignment) -> bool:
    if len(assignment) != len(src.items):
        return False
    load = [0] * src.bins
    for a, j in zip(src.items, assignment):
        if not 0 <= j < src.bins:
            return False
        load[j] += a
    return all(x <= src.capacity for x in load)


def binpacking_solutions(src: BinPacking):
    """Assignments item -> bin (lexicographic)."""
    if len(src.items) > MAX_ORACLE_ITEMS:
        raise OracleUnavailable(f"bin packing oracle handles at most {MAX_ORACLE_ITEMS} items")
    for assignment in itertools.product(range(src.bins), repeat=len(src.items)):
        if is_valid_packing(src, assignment):
            yield assignment


def binpacking_feasible(src: BinPacking) -> bool:
    """Complete depth-first search over item placements.

    Items go largest first; bins holding the same load are interchangeable, so
    only one of them is tried per item. No cap applies since the search is
    exact and quick at oracle sizes.
    """
    items = sorted(src.items, reverse=True)
    if any(a > src.capacity for a in items):
        return False
    loads = [0] * src.bins

    def place(i):
        if i == len(items):
            return True
        tried = set()
        for j in range(src.bins):
            if loads[j] in tried or loads[j] + items[i] > src.capacity:
                continue
            tried.add(loads[j])
            loads[j] += items[i]
            if place(i + 1):
                return True
            loads[j] -= items[i]
        return False

    return place(0)


def is_valid_partition(src: ThreePartition, assignment) -> bool:
    if len(assignment) != len(src.values):
        return False
    sums = [0] * src.groups
    sizes = [0] * src.groups
    for a, j in zip(src.values, assignment):
        if not 0 <= j < src.groups:
            return False
        sums[j] += a
        sizes[j] += 1
    return all(s == src.bound for s in sums) and all(c == 3 for c in sizes)


def three_partition_solutions(src: ThreePartition):
    """Assignments element -> group."""
    if len(src.values) > MAX_PARTITION_ELEMENTS:
        raise OracleUnavailable(
            f"3-partition oracle handles at most {MAX_PARTITION_ELEMENTS} elements"
        )
    for assignment in itertools.product(range(src.groups), repeat=len(src.values)):
        if is_valid_partition(src, assignment):
            yield assignment


def three_partition_feasible(src: ThreePartition) -> bool:
    return next(three_partition_solutions(src), None) is not None


def first_solution(gen):
    return next(iter(gen), None)
