"""Exact solvers: exhaustive enumeration, pruned backtracking and MLU minimisation.

All load arithmetic is exact. Each demand's candidate segment paths are turned
into integer load rows over a common denominator, so capacity tests are integer
comparisons; when the scaled values could overflow int64 the rows fall back to
Python integers (object arrays) and the numpy code path.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _accel
from .model import Instance, RoutingScheme
from .routing import UnreachableError, check_feasible, router

_I64_SAFE = 2**62


@dataclass(frozen=True)
class Limits:
    """Search limits; a solver reports ``aborted`` when either is exceeded."""

    max_nodes: int = 10**8
    time_limit: float = 60.0
    threads: int = 1


@dataclass
class SolveResult:
    status: str  # "yes" | "no" | "aborted"
    scheme: RoutingScheme | None = None
    explored: int = 0
    algorithm: str = ""
    reason: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def yes(self) -> bool:
        return self.status == "yes"


class SearchAborted(RuntimeError):
    """Raised when a search exceeds its :class:`Limits`."""


_Aborted = SearchAborted


# ---------------------------------------------------------------------------
# candidate segment paths


def waypoint_sequences(n: int, k: int):
    """All waypoint sequences of length 0..k in enumeration order."""
    for length in range(k + 1):
        yield from itertools.product(range(n), repeat=length)


@dataclass
class Candidates:
    """Candidate waypoint sequences for one terminal pair, with unit-bandwidth loads."""

    seqs: list
    valid: list
    loads: list  # per sequence: dict unit -> Fraction (empty when invalid)

    @property
    def denominator(self) -> int:
        den = 1
        for row in self.loads:
            for f in row.values():
                den = math.lcm(den, f.denominator)
        return den


def candidates(net, s: int, t: int, k: int) -> Candidates:
    r = router(net)
    key = ("cand", s, t, k)
    c = r.extra.get(key)
    if c is not None:
        return c
    seqs, valid, loads = [], [], []
    for w in waypoint_sequences(net.n, k):
        stops = (s, *w, t)
        acc: dict = {}
        ok = True
        for a, b in zip(stops[:-1], stops[1:]):
            try:
                fg = r.forwarding_graph(a, b)
            except UnreachableError:
                ok = False
                break
            for unit, f in fg.unit_loads:
                acc[unit] = acc.get(unit, 0) + f
        seqs.append(w)
        valid.append(ok)
        loads.append(acc if ok else {})
    c = Candidates(seqs, valid, loads)
    r.extra[key] = c
    return c


@dataclass
class _Table:
    """Integer candidate rows for every demand of an instance."""

    blocks: list  # per demand: (R_i, U) array
    valid: list  # per demand: bool array
    costs: list  # per demand: int array (waypoint counts)
    seqs: list  # per demand: list of waypoint tuples
    caps: np.ndarray
    scale: int  # loads are multiplied by this common denominator

    @property
    def dtype(self):
        return self.caps.dtype


def _build_table(inst: Instance, order=None, dedup=False, max_len=None) -> _Table:
    net = inst.network
    order = list(range(inst.d)) if order is None else list(order)
    cands = [candidates(net, inst.demands[i].s, inst.demands[i].t, inst.k) for i in order]
    den = 1
    for c in cands:
        den = math.lcm(den, c.denominator)
    nu = len(net.units)
    caps_py = [c * den for (_u, _v, c) in net.units]
    rows_all = []
    peak = max(caps_py, default=0)
    for i, c in zip(order, cands):
        b = inst.demands[i].b
        rows = []
        for ok, ld in zip(c.valid, c.loads):
            row = [0] * nu
            if ok:
                for unit, f in ld.items():
                    row[unit] = int(f * den) * b
            rows.append(row)
        rows_all.append(rows)
        peak = max(peak, max((sum(r) for r in rows), default=0))
    big = peak * max(inst.d, 1) >= _I64_SAFE
    dtype = object if big else np.int64
    blocks, valids, costs, seqs = [], [], [], []
    for c, rows in zip(cands, rows_all):
        keep = range(len(rows))
        if max_len is not None:
            keep = [j for j in keep if len(c.seqs[j]) <= max_len]
        if dedup:
            # one representative (fewest waypoints, then first in order) per load vector
            best = {}
            for j in keep:
                if not c.valid[j]:
                    continue
                key = tuple(rows[j])
                if key not in best:
                    best[key] = j
            keep = sorted(best.values())
        keep = list(keep)
        blocks.append(np.array([rows[j] for j in keep], dtype=dtype).reshape(len(keep), nu))
        valids.append(np.array([c.valid[j] for j in keep], dtype=bool))
        costs.append(np.array([len(c.seqs[j]) for j in keep], dtype=np.int64))
        seqs.append([c.seqs[j] for j in keep])
    return _Table(blocks, valids, costs, seqs, np.array(caps_py, dtype=dtype), den)


def _scheme(inst, table, order, digits) -> RoutingScheme:
    wps = [None] * inst.d
    for pos, i in enumerate(order):
        wps[i] = table.seqs[pos][int(digits[pos])]
    return RoutingScheme.from_waypoints(inst.demands, wps)


def _stack(table, start=0):
    blocks = table.blocks[start:]
    if not blocks:
        return np.zeros((0, len(table.caps)), dtype=table.dtype), [], [], [], []
    offsets = np.cumsum([0] + [len(b) for b in blocks[:-1]])
    counts = [len(b) for b in blocks]
    stack = np.concatenate(blocks, axis=0) if blocks else None
    valid = np.concatenate(table.valid[start:])
    costs = np.concatenate(table.costs[start:])
    return stack, offsets, counts, valid, costs


# ---------------------------------------------------------------------------
# brute force


def solve_brute(inst: Instance, limits: Limits | None = None, count_all: bool = False) -> SolveResult:
    """Enumerate every scheme in lexicographic order; return the first feasible one.

    With ``count_all`` the whole space is visited (``explored`` then equals
    ``(sum_{i<=k} n^i)^d``) and ``stats['feasible']`` counts feasible schemes.
    The space is partitioned by the first demand's sequence; with
    ``limits.threads > 1`` partitions run concurrently and the lowest
    feasible partition wins, so the answer matches the sequential run.
    """
    limits = limits or Limits()
    t0 = time.perf_counter()
    if inst.d == 0:
        return SolveResult("yes", RoutingScheme(()), 1, "brute", stats={"feasible": 1})
    table = _build_table(inst)
    mode = _accel.SCAN_COUNT if count_all else _accel.SCAN_FIRST
    first = table.blocks[0]
    rest = _stack(table, 1)
    explored = 0
    feasible = 0
    found = None

    def run(j):
        if not table.valid[0][j]:
            return None, _space(table, 1), 0, False
        caps = table.caps - first[j]
        if inst.d == 1:
            ok = bool(np.all(caps >= 0))
            return (np.array([], dtype=np.int64) if ok else None), 1, int(ok), False
        stack, offsets, counts, valid, costs = rest
        budget = max(1, limits.max_nodes - explored)
        digits, ex, nf, _c, ab = _accel.scan_product(
            stack, offsets, counts, valid, caps, costs, mode, budget
        )
        return (digits if digits.size and digits[0] >= 0 else None), int(ex), int(nf), bool(ab)

    indices = range(len(first))
    if limits.threads > 1:
        with ThreadPoolExecutor(limits.threads) as pool:
            results = pool.map(run, indices)
            for j, (digits, ex, nf, ab) in zip(indices, results):
                explored += ex
                feasible += nf
                if digits is not None and found is None:
                    found = (j, digits)
                    if not count_all:
                        break
                if ab:
                    # an earlier partition was cut short, so a later hit is not the lexicographic first
                    return SolveResult("aborted", None, explored, "brute", "node limit")
    else:
        for j in indices:
            digits, ex, nf, ab = run(j)
            explored += ex
            feasible += nf
            if digits is not None and found is None:
                found = (j, digits)
                if not count_all:
                    break
            if ab or explored >= limits.max_nodes:
                return SolveResult("aborted", None, explored, "brute", "node limit")
            if time.perf_counter() - t0 > limits.time_limit:
                return SolveResult("aborted", None, explored, "brute", "time limit")
    stats = {"feasible": feasible}
    if found is None:
        return SolveResult("no", None, explored, "brute", stats=stats)
    j, digits = found
    scheme = _scheme(inst, table, range(inst.d), [j, *digits])
    return SolveResult("yes", scheme, explored, "brute", stats=stats)


def _space(table, start):
    out = 1
    for b in table.blocks[start:]:
        out *= len(b)
    return out


def scheme_space_size(n: int, k: int, d: int) -> int:
    return sum(n**i for i in range(k + 1)) ** d


# ---------------------------------------------------------------------------
# backtracking


def _backtrack(table, caps, limits, t0, memo=True):
    """Depth-first search over deduplicated rows; returns (digits or None, explored)."""
    d = len(table.blocks)
    explored = 0
    failed = set()
    digits = [0] * d
    check_every = 4096

    def rec(depth, cur):
        nonlocal explored
        if depth == d:
            return True
        block = table.blocks[depth]
        if len(block) == 0:
            return False
        new = block + cur
        ok = np.all(new <= caps, axis=1) & table.valid[depth]
        for j in np.flatnonzero(ok):
            explored += 1
            if explored >= limits.max_nodes:
                raise _Aborted("node limit")
            if explored % check_every == 0 and time.perf_counter() - t0 > limits.time_limit:
                raise _Aborted("time limit")
            nxt = new[j]
            key = None
            if memo and depth + 1 < d:
                key = (depth + 1, nxt.tobytes() if nxt.dtype != object else tuple(nxt))
                if key in failed:
                    continue
            digits[depth] = int(j)
            if rec(depth + 1, nxt):
                return True
            if key is not None:
                failed.add(key)
        return False

    start = np.zeros(len(caps), dtype=table.dtype)
    found = rec(0, start)
    return (digits if found else None), explored


def _demand_order(inst):
    return sorted(range(inst.d), key=lambda i: (-inst.demands[i].b, i))


def solve_backtrack(inst: Instance, limits: Limits | None = None) -> SolveResult:
    """Assign demands one at a time (heaviest first), pruning on capacity.

    Candidates with identical load vectors are merged (the fewest-waypoint
    representative is kept), and load states already known to fail at a
    given depth are skipped.
    """
    limits = limits or Limits()
    t0 = time.perf_counter()
    if inst.d == 0:
        return SolveResult("yes", RoutingScheme(()), 1, "backtrack")
    order = _demand_order(inst)
    table = _build_table(inst, order, dedup=True)
    try:
        digits, explored = _backtrack(table, table.caps, limits, t0)
    except _Aborted as exc:
        return SolveResult("aborted", None, limits.max_nodes, "backtrack", str(exc))
    if digits is None:
        return SolveResult("no", None, explored, "backtrack")
    return SolveResult("yes", _scheme(inst, table, order, digits), explored, "backtrack")


def solve(inst: Instance, algorithm: str = "backtrack", limits: Limits | None = None) -> SolveResult:
    if algorithm == "brute":
        return solve_brute(inst, limits)
    if algorithm == "backtrack":
        return solve_backtrack(inst, limits)
    raise ValueError(f"unknown algorithm {algorithm!r}")


# ---------------------------------------------------------------------------
# waypoint minimisation (used as an oracle for the cycle solver)


@dataclass
class MinWaypoints:
    """Waypoint minimisation summary.

    ``total`` is the least total number of waypoints over feasible schemes and
    ``max_per_demand`` the least achievable per-demand maximum (the smallest
    budget under which the instance is feasible, capped by the search budget).
    """

    feasible: bool
    total: int | None
    max_per_demand: int | None
    per_demand: tuple | None
    scheme: RoutingScheme | None


def min_total_waypoints(inst: Instance, max_per_demand: int | None = None) -> MinWaypoints:
    """Least total number of waypoints over feasible schemes using <= k per demand.

    Candidates with identical load vectors are interchangeable, so each class
    is represented by its cheapest member before the exhaustive scan.
    """
    if inst.d == 0:
        return MinWaypoints(True, 0, 0, (), RoutingScheme(()))
    table = _build_table(inst, dedup=True, max_len=max_per_demand)
    stack, offsets, counts, valid, costs = _stack(table)
    digits, total, worst = _accel.min_costs(stack, offsets, counts, valid, table.caps, costs)
    if digits[0] < 0:
        return MinWaypoints(False, None, None, None, None)
    scheme = _scheme(inst, table, range(inst.d), digits)
    return MinWaypoints(True, total, worst, tuple(p.n_waypoints for p in scheme), scheme)


# ---------------------------------------------------------------------------
# maximum link utilisation


@dataclass
class MLUResult:
    value: Fraction | None  # exact optimum (exact mode)
    lo: Fraction
    hi: Fraction
    scheme: RoutingScheme
    mode: str
    iterations: int = 0


def _utilization(table, digits_rows) -> Fraction:
    tot = sum(digits_rows)
    return max(
        (Fraction(int(x), int(c)) for x, c in zip(tot, table.caps)), default=Fraction(0)
    )


def _check_routable(inst):
    r = router(inst.network)
    for i, dem in enumerate(inst.demands):
        if r.distance(dem.s, dem.t) is None:
            raise UnreachableError(dem.s, dem.t, i)


def minimize_mlu(
    inst: Instance,
    mode: str = "exact",
    eps: Fraction | float = Fraction(1, 1000),
    limits: Limits | None = None,
) -> MLUResult:
    """Minimise the maximum of load/capacity over all edges.

    ``exact`` runs branch and bound over all schemes and returns the optimum as
    a fraction. ``binary`` bisects a utilisation threshold ``x`` (feasibility
    with every capacity scaled by ``x``) until the bracket is at most ``eps``
    wide; ``lo`` is then infeasible (or 0) and ``hi`` is achieved by the witness.
    """
    limits = limits or Limits()
    _check_routable(inst)
    if inst.d == 0:
        z = Fraction(0)
        return MLUResult(z, z, z, RoutingScheme(()), mode)
    order = _demand_order(inst)
    table = _build_table(inst, order, dedup=True)
    direct = [0] * inst.d  # row 0 is always the empty sequence
    if mode == "exact":
        value, digits = _mlu_branch_and_bound(table, limits)
        return MLUResult(value, value, value, _scheme(inst, table, order, digits), mode)
    if mode != "binary":
        raise ValueError(f"unknown MLU mode {mode!r}")
    eps = Fraction(eps)
    hi = _utilization(table, [table.blocks[p][0] for p in range(inst.d)])
    best = direct
    lo = Fraction(0)
    it = 0
    t0 = time.perf_counter()
    obj = np.dtype(object)
    while hi - lo > eps:
        it += 1
        mid = (lo + hi) / 2
        # loads <= mid * cap  <=>  q * loads <= p * cap
        p, q = mid.numerator, mid.denominator
        scaled = _Table(
            [np.asarray(b, dtype=obj) * q for b in table.blocks],
            table.valid,
            table.costs,
            table.seqs,
            np.asarray(table.caps, dtype=obj) * p,
            table.scale,
        )
        try:
            digits, _ = _backtrack(scaled, scaled.caps, limits, t0)
        except _Aborted:
            break
        if digits is None:
            lo = mid
        else:
            best = digits
            hi = _utilization(table, [table.blocks[i][j] for i, j in enumerate(digits)])
    return MLUResult(None, lo, hi, _scheme(inst, table, order, best), mode, it)


def _mlu_branch_and_bound(table, limits):
    d = len(table.blocks)
    caps = [int(c) for c in table.caps]
    blocks = [[[int(x) for x in row] for row in b] for b in table.blocks]
    best_val = None
    best_digits = None
    digits = [0] * d
    explored = 0
    t0 = time.perf_counter()

    def util(load):
        return max((Fraction(x, c) for x, c in zip(load, caps)), default=Fraction(0))

    def rec(depth, load, cur):
        nonlocal best_val, best_digits, explored
        if best_val is not None and cur >= best_val:
            return
        if depth == d:
            best_val = cur
            best_digits = list(digits)
            return
        options = []
        for j, row in enumerate(blocks[depth]):
            if not table.valid[depth][j]:
                continue
            new = [a + b for a, b in zip(load, row)]
            options.append((util(new), j, new))
        options.sort(key=lambda o: (o[0], o[1]))
        for u, j, new in options:
            explored += 1
            if explored >= limits.max_nodes or time.perf_counter() - t0 > limits.time_limit:
                raise _Aborted("limit")
            digits[depth] = j
            rec(depth + 1, new, u)

    rec(0, [0] * len(caps), Fraction(0))
    return best_val, best_digits


def verify(inst: Instance, result: SolveResult) -> bool:
    """True when a ``yes`` result carries a feasible, in-budget scheme."""
    return result.scheme is not None and check_feasible(inst, result.scheme).feasible
