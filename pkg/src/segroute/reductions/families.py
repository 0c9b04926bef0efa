"""Seeded random instance families used by the oracle and scaling suites."""
from __future__ import annotations

import random

from ..model import Instance


def random_cactus_edges(rng: random.Random, n: int, cycle_prob: float = 0.6, max_cycle: int = 6):
    """Grow a connected cactus on about ``n`` vertices by attaching pendants and cycles."""
    edges = []
    m = 1
    while m < n:
        at = rng.randrange(m)
        if rng.random() >= cycle_prob or n - m < 2:
            edges.append((at, m))
            m += 1
            continue
        L = rng.randint(3, min(max_cycle, n - m + 1))
        ring = [at] + list(range(m, m + L - 1))
        m += L - 1
        edges += [(ring[i], ring[(i + 1) % L]) for i in range(L)]
    return m, edges


def random_unit_cactus(seed: int, n: int, cycles: int | None = None, d: int = 2, k: int = 1) -> Instance:
    """Unit cactus instance with ``d`` random demands; ``cycles`` fixes the cycle count when given."""
    rng = random.Random(seed)
    if cycles is None:
        m, edges = random_cactus_edges(rng, n)
    else:
        m, edges = _cactus_with_cycles(rng, n, cycles)
    demands = []
    while len(demands) < d and m > 1:
        s, t = rng.randrange(m), rng.randrange(m)
        if s != t:
            demands.append((s, t, 1))
    return Instance.build("undirected", m, [(u, v, 1, 1) for u, v in edges], demands, k)


def _cactus_with_cycles(rng, n, cycles):
    if cycles * 2 + 1 > max(n, 1):
        raise ValueError(f"{cycles} cycles need at least {2 * cycles + 1} vertices")
    # split the spare vertices between cycle lengths and pendants
    lengths = [3] * cycles
    spare = n - 1 - 2 * cycles
    for _ in range(spare):
        if cycles and rng.random() < 0.5:
            lengths[rng.randrange(cycles)] += 1
    pendants = n - 1 - sum(L - 1 for L in lengths)
    parts = ["c"] * cycles + ["p"] * pendants
    rng.shuffle(parts)
    edges = []
    m = 1
    ci = 0
    for part in parts:
        at = rng.randrange(m)
        if part == "p":
            edges.append((at, m))
            m += 1
        else:
            L = lengths[ci]
            ci += 1
            ring = [at] + list(range(m, m + L - 1))
            m += L - 1
            edges += [(ring[i], ring[(i + 1) % L]) for i in range(L)]
    return m, edges


def chained_cycles(n: int, d: int = 2, k: int = 1, cycle_len: int = 4, seed: int | None = None) -> Instance:
    """Cycles of ``cycle_len`` glued at antipodal vertices into a chain of about ``n`` vertices.

    Without a seed the demands alternate between the two chain ends; with a seed
    they are drawn at random.
    """
    if cycle_len < 3:
        raise ValueError("cycle length must be at least 3")
    count = max(1, (n - 1) // (cycle_len - 1))
    edges = []
    cur, m = 0, 1
    for _ in range(count):
        ring = [cur] + list(range(m, m + cycle_len - 1))
        m += cycle_len - 1
        edges += [(ring[i], ring[(i + 1) % cycle_len]) for i in range(cycle_len)]
        cur = ring[cycle_len // 2]
    last = cur
    if seed is None:
        demands = [(0, last, 1) if i % 2 == 0 else (last, 0, 1) for i in range(d)]
    else:
        rng = random.Random(seed)
        demands = []
        while len(demands) < d:
            s, t = rng.randrange(m), rng.randrange(m)
            if s != t:
                demands.append((s, t, 1))
    return Instance.build("undirected", m, [(u, v, 1, 1) for u, v in edges], demands, k)
