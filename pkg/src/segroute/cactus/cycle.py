"""Minimum-waypoint unit segment routing on a single cycle.

On a ring of length L with unit weights and capacities, a demand either uses
its direct forwarding graph (the shorter arc, or both arcs with half the flow
when its terminals are antipodal) or is pinned to one arc by waypoints. A
segment follows a unique shortest path iff it spans at most ``p = (L-1)//2``
edges, so pinning a demand to an arc of ``a`` edges costs ``ceil(a/p) - 1``
waypoints.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CycleSolution:
    costs: tuple[int, ...]  # waypoints per demand
    waypoints: tuple[tuple[int, ...], ...]  # ordered from source to target
    routes: tuple[str, ...]  # "split", "cw" (increasing ring position) or "ccw"


@dataclass(frozen=True)
class CycleVerdict:
    status: str  # "infeasible" | "unique" | "two"
    case: str
    solutions: tuple[CycleSolution, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"

    @property
    def min_total(self) -> int | None:
        return min((sum(s.costs) for s in self.solutions), default=None)

    @property
    def min_max(self) -> int | None:
        """Least per-demand budget under which some minimal solution fits."""
        return min((max(s.costs, default=0) for s in self.solutions), default=None)


class _Ring:
    def __init__(self, ring):
        self.ring = tuple(ring)
        self.L = len(self.ring)
        if self.L < 3:
            raise ValueError("a cycle needs at least 3 vertices")
        self.pos = {v: i for i, v in enumerate(self.ring)}
        if len(self.pos) != self.L:
            raise ValueError("ring vertices must be distinct")
        self.p = (self.L - 1) // 2

    def length(self, x, y, direction):
        a = (self.pos[y] - self.pos[x]) % self.L
        return a if direction == "cw" else self.L - a

    def antipodal(self, x, y):
        return 2 * self.length(x, y, "cw") == self.L

    def interior(self, x, y, direction):
        step = 1 if direction == "cw" else -1
        i = self.pos[x]
        out = []
        for _ in range(self.length(x, y, direction) - 1):
            i = (i + step) % self.L
            out.append(self.ring[i])
        return out

    def pin_cost(self, a):
        return -(-a // self.p) - 1

    def pin(self, x, y, direction):
        """Waypoints forcing the flow from x to y along one arc."""
        step = 1 if direction == "cw" else -1
        m = self.pin_cost(self.length(x, y, direction))
        i = self.pos[x]
        return tuple(self.ring[(i + step * self.p * j) % self.L] for j in range(1, m + 1))

    def shorter(self, x, y):
        return "cw" if 2 * self.length(x, y, "cw") < self.L else "ccw"

    def alternate(self, d1, d2):
        (a, b), (c, e) = d1, d2
        if {a, b} & {c, e}:
            return False
        inside = set(self.interior(a, b, "cw"))
        return (c in inside) != (e in inside)


def _direct(R, demands):
    return CycleSolution(
        tuple(0 for _ in demands),
        tuple(() for _ in demands),
        tuple("split" if R.antipodal(x, y) else R.shorter(x, y) for x, y in demands),
    )


def _free_sides(R, demands):
    """Per demand, the arc direction(s) whose interior holds no other demand's terminal."""
    out = []
    for i, (x, y) in enumerate(demands):
        others = {v for j, dm in enumerate(demands) if j != i for v in dm}
        out.append([dr for dr in ("cw", "ccw") if not others & set(R.interior(x, y, dr))])
    return out


def _pinned(R, demands, directions):
    wps = tuple(R.pin(x, y, dr) for (x, y), dr in zip(demands, directions))
    return CycleSolution(tuple(len(w) for w in wps), wps, tuple(directions))


def solve_cycle_min(ring, demands) -> CycleVerdict:
    """Decide a unit instance on a cycle and return its minimal waypoint solution(s).

    ``ring`` lists the cycle's vertices in order; ``demands`` are terminal
    pairs on the ring (distinct terminals). Cases:

    * one demand: route directly.
    * two demands whose forwarding graphs both split: each edge carries
      1/2 + 1/2, so direct routing is feasible.
    * two alternating demands: every pair of arcs overlaps, so infeasible.
    * two duplicate demands: one takes the shorter arc for free, the other is
      pinned to the longer arc; both assignments are minimal.
    * otherwise (disjoint, nested or three or more demands): feasible iff there
      are no duplicates and every demand has an arc free of other terminals;
      that arc is then forced.
    """
    R = _Ring(ring)
    demands = [tuple(dm) for dm in demands]
    for x, y in demands:
        if x == y or x not in R.pos or y not in R.pos:
            raise ValueError(f"demand ({x},{y}) is not a pair of distinct ring vertices")
    d = len(demands)
    if d <= 1:
        return CycleVerdict("unique", "single" if d else "empty", (_direct(R, demands),))
    if d == 2:
        (a, b), (c, e) = demands
        if R.antipodal(a, b) and R.antipodal(c, e):
            return CycleVerdict("unique", "both-split", (_direct(R, demands),))
        if R.alternate(demands[0], demands[1]):
            return CycleVerdict("infeasible", "alternating")
        if {a, b} == {c, e}:
            short, long_ = R.shorter(a, b), ("ccw" if R.shorter(a, b) == "cw" else "cw")
            # second demand may run in the opposite orientation
            flip = {"cw": "ccw", "ccw": "cw"}
            d2 = (lambda dr: dr) if (a, b) == (c, e) else (lambda dr: flip[dr])
            one = _pinned(R, demands, (short, d2(long_)))
            two = _pinned(R, demands, (long_, d2(short)))
            return CycleVerdict("two", "duplicates", (one, two))
        free = _free_sides(R, demands)
        dirs = tuple(f[0] for f in free)
        sol = _pinned(R, demands, dirs)
        case = "disjoint" if all(c == 0 for c in sol.costs) else "nested"
        return CycleVerdict("unique", case, (sol,))
    pairs = [frozenset(dm) for dm in demands]
    if len(set(pairs)) < d:
        return CycleVerdict("infeasible", "multi-duplicates")
    free = _free_sides(R, demands)
    if any(not f for f in free):
        return CycleVerdict("infeasible", "multi-blocked")
    return CycleVerdict("unique", "multi", (_pinned(R, demands, tuple(f[0] for f in free)),))
