"""Numeric kernels with a numba fast path and a pure-numpy fallback.

Set ``SEGROUTE_DISABLE_NUMBA=1`` to force the numpy implementations (useful
for debugging and for benchmarking the two paths against each other).
"""
from __future__ import annotations

import itertools
import os

import numpy as np

INF = np.iinfo(np.int64).max // 4

_DISABLED = os.environ.get("SEGROUTE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by environment")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# single-source shortest paths on CSR adjacency


@njit(cache=True)
def _sssp_numba(indptr, indices, weights, source):
    n = indptr.shape[0] - 1
    dist = np.full(n, INF, dtype=np.int64)
    dist[source] = 0
    # binary heap of (key, vertex) with lazy deletion
    cap = indices.shape[0] + n + 1
    hkey = np.empty(cap, dtype=np.int64)
    hval = np.empty(cap, dtype=np.int64)
    size = 0
    hkey[0] = 0
    hval[0] = source
    size = 1
    while size > 0:
        d = hkey[0]
        u = hval[0]
        size -= 1
        if size > 0:
            lk = hkey[size]
            lv = hval[size]
            i = 0
            while True:
                c = 2 * i + 1
                if c >= size:
                    break
                if c + 1 < size and hkey[c + 1] < hkey[c]:
                    c += 1
                if hkey[c] >= lk:
                    break
                hkey[i] = hkey[c]
                hval[i] = hval[c]
                i = c
            hkey[i] = lk
            hval[i] = lv
        if d > dist[u]:
            continue
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            nd = d + weights[p]
            if nd < dist[v]:
                dist[v] = nd
                i = size
                size += 1
                while i > 0:
                    par = (i - 1) // 2
                    if hkey[par] <= nd:
                        break
                    hkey[i] = hkey[par]
                    hval[i] = hval[par]
                    i = par
                hkey[i] = nd
                hval[i] = v
    return dist


def _sssp_numpy(tail, head, weights, n, source):
    dist = np.full(n, INF, dtype=np.int64)
    dist[source] = 0
    if tail.size == 0:
        return dist
    for _ in range(n):
        reach = dist[tail] < INF
        cand = np.where(reach, dist[tail] + weights, INF)
        new = dist.copy()
        np.minimum.at(new, head, cand)
        if np.array_equal(new, dist):
            break
        dist = new
    return dist


def sssp(indptr, indices, weights, tail, source):
    """Distances from ``source``; unreachable vertices get ``INF``."""
    if HAVE_NUMBA:
        return _sssp_numba(indptr, indices, weights, source)
    return _sssp_numpy(tail, indices, weights, indptr.shape[0] - 1, source)


def apsp_numpy(tail, head, weights, n):
    """Multi-source Bellman-Ford relaxation, vectorised over all sources."""
    dist = np.full((n, n), INF, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    if tail.size == 0:
        return dist
    for _ in range(n):
        src = dist[:, tail]
        cand = np.where(src < INF, src + weights, INF)
        new = dist.copy()
        np.minimum.at(new.T, head, cand.T)
        if np.array_equal(new, dist):
            break
        dist = new
    return dist


# ---------------------------------------------------------------------------
# forwarding-graph membership


@njit(cache=True)
def _fg_mask_numba(tail, head, weights, dist_from, dist_to, total):
    m = tail.shape[0]
    out = np.zeros(m, dtype=np.bool_)
    for a in range(m):
        x = dist_from[tail[a]]
        y = dist_to[head[a]]
        if x < INF and y < INF and x + weights[a] + y == total:
            out[a] = True
    return out


def fg_mask(tail, head, weights, dist_from, dist_to, total):
    """Arcs (a, b, w) with dist_from[a] + w + dist_to[b] == total."""
    if HAVE_NUMBA:
        return _fg_mask_numba(tail, head, weights, dist_from, dist_to, total)
    x = dist_from[tail]
    y = dist_to[head]
    ok = (x < INF) & (y < INF)
    return ok & (np.where(ok, x + weights + y, -1) == total)


# ---------------------------------------------------------------------------
# exhaustive scan over the product of per-demand candidate load vectors
#
# stack:   (R, U) integer load rows, demand blocks concatenated
# offsets: first row of each demand block; counts: rows per block
# valid:   False rows are unroutable and never feasible
# caps:    (U,) capacities on the same integer scale
# costs:   (R,) per-row cost (waypoint count), used by mode 2
# mode 0: stop at the first feasible combination (lexicographic order)
# mode 1: visit everything, report the first feasible and the count
# mode 2: visit everything, report the feasible combination of least cost

SCAN_FIRST, SCAN_COUNT, SCAN_MIN_COST = 0, 1, 2


@njit(cache=True, nogil=True)
def _scan_numba(stack, offsets, counts, valid, caps, costs, mode, max_nodes):
    d = offsets.shape[0]
    u = caps.shape[0]
    best = np.full(d, -1, dtype=np.int64)
    best_cost = INF
    explored = 0
    feasible = 0
    if d == 0:
        best_cost = 0
        return best, 1, 1, best_cost, False
    for i in range(d):
        if counts[i] == 0:
            return best, 0, 0, best_cost, False
    digits = np.zeros(d, dtype=np.int64)
    partial = np.zeros((d + 1, u), dtype=np.int64)
    pcost = np.zeros(d + 1, dtype=np.int64)
    pvalid = np.ones(d + 1, dtype=np.bool_)
    level = 0
    while True:
        # extend the prefix up to the last demand
        while level < d:
            r = offsets[level] + digits[level]
            pvalid[level + 1] = pvalid[level] and valid[r]
            for e in range(u):
                partial[level + 1, e] = partial[level, e] + stack[r, e]
            pcost[level + 1] = pcost[level] + costs[r]
            level += 1
        explored += 1
        ok = pvalid[d]
        if ok:
            for e in range(u):
                if partial[d, e] > caps[e]:
                    ok = False
                    break
        if ok:
            feasible += 1
            if mode == 2:
                if pcost[d] < best_cost:
                    best_cost = pcost[d]
                    best[:] = digits
            elif best[0] < 0:
                best[:] = digits
                best_cost = pcost[d]
                if mode == 0:
                    return best, explored, feasible, best_cost, False
        if explored >= max_nodes:
            return best, explored, feasible, best_cost, True
        # advance the mixed-radix counter
        level = d - 1
        while level >= 0:
            digits[level] += 1
            if digits[level] < counts[level]:
                break
            digits[level] = 0
            level -= 1
        if level < 0:
            break
    return best, explored, feasible, best_cost, False


def _scan_numpy(stack, offsets, counts, valid, caps, costs, mode, max_nodes):
    d = len(offsets)
    best = np.full(d, -1, dtype=np.int64)
    if d == 0:
        return best, 1, 1, 0, False
    if any(int(c) == 0 for c in counts):
        return best, 0, 0, INF, False
    blocks = [stack[o : o + c] for o, c in zip(offsets, counts)]
    vblocks = [valid[o : o + c] for o, c in zip(offsets, counts)]
    cblocks = [costs[o : o + c] for o, c in zip(offsets, counts)]
    explored = 0
    feasible = 0
    best_cost = INF
    # broadcast over the last (up to) two demands, loop over the rest
    tail_n = min(d, 2)
    head_n = d - tail_n
    if tail_n == 2:
        a, b = blocks[-2], blocks[-1]
        tail_load = a[:, None, :] + b[None, :, :]
        tail_valid = vblocks[-2][:, None] & vblocks[-1][None, :]
        tail_cost = cblocks[-2][:, None] + cblocks[-1][None, :]
    else:
        tail_load = blocks[-1][None, :, :]
        tail_valid = vblocks[-1][None, :]
        tail_cost = cblocks[-1][None, :]
    per_prefix = tail_valid.size
    for prefix in itertools.product(*(range(int(c)) for c in counts[:head_n])):
        base = np.zeros(stack.shape[1], dtype=stack.dtype)
        pv = True
        pc = 0
        for i, r in enumerate(prefix):
            base = base + blocks[i][r]
            pv = pv and bool(vblocks[i][r])
            pc += int(cblocks[i][r])
        ok = np.all(tail_load + base <= caps, axis=-1) & tail_valid
        if not pv:
            ok[...] = False
        flat = ok.ravel()
        hits = np.flatnonzero(flat)
        if mode == SCAN_FIRST and hits.size:
            first = int(hits[0])
            explored += first + 1
            feasible += 1
            tail_idx = np.unravel_index(first, ok.shape)
            best[:] = list(prefix) + [int(x) for x in tail_idx][-tail_n:]
            return best, explored, feasible, pc + int(tail_cost.ravel()[first]), False
        explored += per_prefix
        feasible += int(hits.size)
        if hits.size:
            if mode == SCAN_MIN_COST:
                cflat = tail_cost.ravel()[hits]
                j = int(np.argmin(cflat))
                if pc + int(cflat[j]) < best_cost:
                    best_cost = pc + int(cflat[j])
                    tail_idx = np.unravel_index(int(hits[j]), ok.shape)
                    best[:] = list(prefix) + [int(x) for x in tail_idx][-tail_n:]
            elif best[0] < 0:
                tail_idx = np.unravel_index(int(hits[0]), ok.shape)
                best[:] = list(prefix) + [int(x) for x in tail_idx][-tail_n:]
                best_cost = pc + int(tail_cost.ravel()[hits[0]])
        if explored >= max_nodes:
            return best, explored, feasible, best_cost, True
    return best, explored, feasible, best_cost, False


def scan_product(stack, offsets, counts, valid, caps, costs, mode=SCAN_FIRST, max_nodes=INF):
    """Scan every combination of one row per demand block.

    Returns ``(digits, explored, n_feasible, cost, aborted)``; ``digits`` holds
    the row index chosen inside each block (``-1`` when nothing is feasible).
    Object-dtype inputs (exact big integers) always take the numpy path.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    counts = np.asarray(counts, dtype=np.int64)
    valid = np.asarray(valid, dtype=np.bool_)
    costs = np.asarray(costs, dtype=np.int64)
    if HAVE_NUMBA and stack.dtype == np.int64:
        return _scan_numba(stack, offsets, counts, valid, caps, costs, mode, max_nodes)
    return _scan_numpy(stack, offsets, counts, valid, caps, costs, mode, max_nodes)


# ---------------------------------------------------------------------------
# least total cost and least per-demand maximum cost over feasible combinations


@njit(cache=True, nogil=True)
def _min_costs_numba(stack, offsets, counts, valid, caps, costs):
    d = offsets.shape[0]
    u = caps.shape[0]
    best_total = INF
    best_max = INF
    arg_total = np.full(d, -1, dtype=np.int64)
    if d == 0:
        return arg_total, 0, 0
    for i in range(d):
        if counts[i] == 0:
            return arg_total, best_total, best_max
    digits = np.zeros(d, dtype=np.int64)
    partial = np.zeros((d + 1, u), dtype=np.int64)
    ptot = np.zeros(d + 1, dtype=np.int64)
    pmax = np.zeros(d + 1, dtype=np.int64)
    pok = np.ones(d + 1, dtype=np.bool_)
    level = 0
    while True:
        while level < d:
            r = offsets[level] + digits[level]
            ok = pok[level] and valid[r]
            if ok:
                for e in range(u):
                    x = partial[level, e] + stack[r, e]
                    partial[level + 1, e] = x
                    if x > caps[e]:
                        ok = False
            pok[level + 1] = ok
            ptot[level + 1] = ptot[level] + costs[r]
            pmax[level + 1] = max(pmax[level], costs[r])
            level += 1
        if pok[d]:
            if ptot[d] < best_total:
                best_total = ptot[d]
                arg_total[:] = digits
            if pmax[d] < best_max:
                best_max = pmax[d]
        level = d - 1
        while level >= 0:
            digits[level] += 1
            if digits[level] < counts[level]:
                break
            digits[level] = 0
            level -= 1
        if level < 0:
            break
    return arg_total, best_total, best_max


def _min_costs_numpy(stack, offsets, counts, valid, caps, costs):
    d = len(offsets)
    arg = np.full(d, -1, dtype=np.int64)
    if d == 0:
        return arg, 0, 0
    if any(int(c) == 0 for c in counts):
        return arg, INF, INF
    best_total, best_max = INF, INF
    ranges = [range(o, o + c) for o, c in zip(offsets, counts)]
    for combo in itertools.product(*ranges):
        rows = list(combo)
        if not valid[rows].all():
            continue
        if np.any(stack[rows].sum(axis=0) > caps):
            continue
        c = costs[rows]
        tot, mx = int(c.sum()), int(c.max())
        if tot < best_total:
            best_total = tot
            arg[:] = [r - o for r, o in zip(rows, offsets)]
        best_max = min(best_max, mx)
    return arg, best_total, best_max


def min_costs(stack, offsets, counts, valid, caps, costs):
    """``(digits of a least-total combination, least total, least maximum)``."""
    offsets = np.asarray(offsets, dtype=np.int64)
    counts = np.asarray(counts, dtype=np.int64)
    valid = np.asarray(valid, dtype=np.bool_)
    costs = np.asarray(costs, dtype=np.int64)
    if HAVE_NUMBA and stack.dtype == np.int64:
        arg, tot, mx = _min_costs_numba(stack, offsets, counts, valid, caps, costs)
    else:
        arg, tot, mx = _min_costs_numpy(stack, offsets, counts, valid, caps, costs)
    return arg, int(tot), int(mx)
