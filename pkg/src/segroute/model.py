"""Core domain types and the plain-text instance / scheme formats."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

MODES = ("undirected", "bidirected", "directed")


class FormatError(ValueError):
    """Malformed or invalid instance/scheme text. Carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Edge(NamedTuple):
    u: int
    v: int
    weight: int = 1
    capacity: int = 1


@dataclass(frozen=True)
class Network:
    """A graph with integer weights and capacities over vertices ``0..n-1``.

    In bidirected mode every listed edge stands for two arcs with equal weight
    and capacity, each with its own capacity budget. In undirected mode both
    traversal directions share the single edge's capacity.
    """

    mode: str
    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.mode not in MODES:
            raise FormatError(f"unknown mode {self.mode!r}")
        if self.n < 0:
            raise FormatError("vertex count must be non-negative")
        edges = tuple(Edge(*map(int, e)) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for e in edges:
            _validate_edge(self.mode, self.n, e, seen)

    # value hash is cached: networks are used as cache keys all over the place
    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.mode, self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def directed(self) -> bool:
        return self.mode == "directed"

    @cached_property
    def arcs(self) -> tuple[tuple[int, int, int, int], ...]:
        """Traversable arcs ``(tail, head, weight, unit)``.

        ``unit`` indexes :attr:`units`, the capacity-carrying entities.
        """
        out = []
        for i, (u, v, w, _c) in enumerate(self.edges):
            if self.mode == "directed":
                out.append((u, v, w, i))
            elif self.mode == "undirected":
                out.append((u, v, w, i))
                out.append((v, u, w, i))
            else:
                out.append((u, v, w, 2 * i))
                out.append((v, u, w, 2 * i + 1))
        return tuple(out)

    @cached_property
    def units(self) -> tuple[tuple[int, int, int], ...]:
        """Capacity units ``(u, v, capacity)``: edges (undirected) or arcs."""
        if self.mode == "bidirected":
            out = []
            for u, v, _w, c in self.edges:
                out.append((u, v, c))
                out.append((v, u, c))
            return tuple(out)
        return tuple((u, v, c) for u, v, _w, c in self.edges)

    @cached_property
    def unit_index(self) -> dict[tuple[int, int], int]:
        """Map an oriented pair to its capacity unit (both orientations when undirected)."""
        idx = {}
        for t, h, _w, unit in self.arcs:
            idx[(t, h)] = unit
        return idx

    def is_unit(self) -> bool:
        return all(e.weight == 1 and e.capacity == 1 for e in self.edges)


def _validate_edge(mode, n, e, seen):
    u, v, w, c = e
    if not (0 <= u < n and 0 <= v < n):
        raise FormatError(f"edge ({u},{v}) has an endpoint outside 0..{n - 1}")
    if u == v:
        raise FormatError(f"self-loop at vertex {u}")
    if w < 1:
        raise FormatError(f"edge ({u},{v}) has non-positive weight {w}")
    if c < 1:
        raise FormatError(f"edge ({u},{v}) has non-positive capacity {c}")
    key = (u, v) if mode == "directed" else (min(u, v), max(u, v))
    if key in seen:
        raise FormatError(f"parallel edge ({u},{v})")
    seen.add(key)


class Demand(NamedTuple):
    s: int
    t: int
    b: int = 1


@dataclass(frozen=True)
class SegmentPath:
    demand_index: int
    stops: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "stops", tuple(int(x) for x in self.stops))
        if len(self.stops) < 2:
            raise ValueError("a segment path needs at least its source and target")

    @property
    def waypoints(self) -> tuple[int, ...]:
        return self.stops[1:-1]

    @property
    def n_waypoints(self) -> int:
        return len(self.stops) - 2

    def segments(self):
        return zip(self.stops[:-1], self.stops[1:])


@dataclass(frozen=True)
class RoutingScheme:
    paths: tuple[SegmentPath, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def __getitem__(self, i):
        return self.paths[i]

    @classmethod
    def from_waypoints(cls, demands, waypoints) -> RoutingScheme:
        """Build a scheme from one waypoint sequence per demand."""
        return cls(
            tuple(
                SegmentPath(i, (d.s, *w, d.t))
                for i, (d, w) in enumerate(zip(demands, waypoints, strict=True))
            )
        )

    @classmethod
    def direct(cls, demands) -> RoutingScheme:
        return cls.from_waypoints(demands, [()] * len(demands))


@dataclass(frozen=True)
class Instance:
    network: Network
    demands: tuple[Demand, ...] = ()
    k: int = 0

    def __post_init__(self):
        demands = tuple(Demand(*map(int, d)) for d in self.demands)
        object.__setattr__(self, "demands", demands)
        if self.k < 0:
            raise FormatError("budget must be non-negative")
        n = self.network.n
        for d in demands:
            if not (0 <= d.s < n and 0 <= d.t < n):
                raise FormatError(f"demand ({d.s},{d.t}) has a terminal outside 0..{n - 1}")
            if d.b < 1:
                raise FormatError(f"demand ({d.s},{d.t}) has non-positive bandwidth {d.b}")
            if d.s == d.t:
                raise FormatError(f"demand with identical terminals {d.s}")

    @property
    def d(self) -> int:
        return len(self.demands)

    def is_unit(self) -> bool:
        return self.network.is_unit() and all(d.b == 1 for d in self.demands)

    @classmethod
    def build(cls, mode, n, edges, demands=(), k=0) -> Instance:
        """Convenience constructor; drops demands whose terminals coincide."""
        net = Network(mode, n, tuple(edges))
        kept = tuple(Demand(*d) for d in demands if d[0] != d[1])
        return cls(net, kept, k)


# ---------------------------------------------------------------------------
# text formats


def _directives(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _ints(tokens, count, lineno, what):
    if len(tokens) != count:
        raise FormatError(f"{what} expects {count} integer(s), got {len(tokens)}", lineno)
    out = []
    for tok in tokens:
        if not tok.isdigit():
            raise FormatError(f"{what}: {tok!r} is not a non-negative decimal integer", lineno)
        out.append(int(tok))
    return out


def parse_instance(text: str) -> Instance:
    mode = None
    n = None
    k = 0
    budget_seen = False
    edges: list[tuple[Edge, int]] = []
    demands: list[Demand] = []
    for lineno, tokens in _directives(text):
        key, args = tokens[0], tokens[1:]
        if key == "mode":
            if len(args) != 1 or args[0] not in MODES:
                raise FormatError(f"mode must be one of {', '.join(MODES)}", lineno)
            if mode is not None:
                raise FormatError("duplicate mode directive", lineno)
            mode = args[0]
        elif key == "vertices":
            if n is not None:
                raise FormatError("duplicate vertices directive", lineno)
            (n,) = _ints(args, 1, lineno, "vertices")
        elif key == "edge":
            if n is None:
                raise FormatError("edge before vertices", lineno)
            edges.append((Edge(*_ints(args, 4, lineno, "edge")), lineno))
        elif key == "demand":
            if n is None:
                raise FormatError("demand before vertices", lineno)
            s, t, b = _ints(args, 3, lineno, "demand")
            if s >= n or t >= n:
                raise FormatError(f"demand terminal outside 0..{n - 1}", lineno)
            if b < 1:
                raise FormatError("demand bandwidth must be positive", lineno)
            if s != t:
                demands.append(Demand(s, t, b))
        elif key == "budget":
            if budget_seen:
                raise FormatError("duplicate budget directive", lineno)
            (k,) = _ints(args, 1, lineno, "budget")
            budget_seen = True
        else:
            raise FormatError(f"unknown directive {key!r}", lineno)
    if mode is None:
        raise FormatError("missing mode directive")
    if n is None:
        raise FormatError("missing vertices directive")
    # validate edge-by-edge so errors carry the offending line
    seen: set = set()
    for e, lineno in edges:
        try:
            _validate_edge(mode, n, e, seen)
        except FormatError as exc:
            raise FormatError(str(exc), lineno) from None
    return Instance(Network(mode, n, tuple(e for e, _ in edges)), tuple(demands), k)


def serialize_instance(inst: Instance, comments: Iterable[str] = ()) -> str:
    net = inst.network
    lines = [f"# {c}" for c in comments]
    lines.append(f"mode {net.mode}")
    lines.append(f"vertices {net.n}")
    lines += [f"edge {u} {v} {w} {c}" for u, v, w, c in net.edges]
    lines += [f"demand {s} {t} {b}" for s, t, b in inst.demands]
    lines.append(f"budget {inst.k}")
    return "\n".join(lines) + "\n"


def parse_scheme(text: str, inst: Instance) -> RoutingScheme:
    found: dict[int, SegmentPath] = {}
    n = inst.network.n
    for lineno, tokens in _directives(text):
        if tokens[0] != "path":
            raise FormatError(f"unknown directive {tokens[0]!r}", lineno)
        if len(tokens) < 4:
            raise FormatError("path needs a demand index and at least two stops", lineno)
        idx, *stops = _ints(tokens[1:], len(tokens) - 1, lineno, "path")
        if idx >= inst.d:
            raise FormatError(f"demand index {idx} out of range (d={inst.d})", lineno)
        if idx in found:
            raise FormatError(f"duplicate path for demand {idx}", lineno)
        for v in stops:
            if v >= n:
                raise FormatError(f"vertex {v} outside 0..{n - 1}", lineno)
        dem = inst.demands[idx]
        if stops[0] != dem.s or stops[-1] != dem.t:
            raise FormatError(
                f"path endpoints ({stops[0]},{stops[-1]}) do not match demand {idx} ({dem.s},{dem.t})",
                lineno,
            )
        found[idx] = SegmentPath(idx, tuple(stops))
    missing = [i for i in range(inst.d) if i not in found]
    if missing:
        raise FormatError(f"missing path for demand(s) {', '.join(map(str, missing))}")
    return RoutingScheme(tuple(found[i] for i in range(inst.d)))


def serialize_scheme(scheme: RoutingScheme) -> str:
    return "".join(
        f"path {p.demand_index} {' '.join(map(str, p.stops))}\n" for p in scheme.paths
    )


def validate_scheme(inst: Instance, scheme: RoutingScheme) -> None:
    """Raise ``ValueError`` unless ``scheme`` has one matching path per demand."""
    if len(scheme) != inst.d:
        raise ValueError(f"scheme has {len(scheme)} paths for {inst.d} demands")
    for i, (p, dem) in enumerate(zip(scheme.paths, inst.demands)):
        if p.demand_index != i:
            raise ValueError(f"path {i} is labelled for demand {p.demand_index}")
        if p.stops[0] != dem.s or p.stops[-1] != dem.t:
            raise ValueError(f"path {i} endpoints do not match demand ({dem.s},{dem.t})")
        if any(not 0 <= v < inst.network.n for v in p.stops):
            raise ValueError(f"path {i} visits a vertex outside the network")
