"""Compare the numba kernels against the pure-numpy fallback.

Each backend runs in a fresh interpreter (the switch is read at import time),
executes the same workloads and reports the best wall time of several repeats
together with a digest of the results, which must agree across backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import hashlib, json, time
import numpy as np
import segroute as sr
from segroute.reductions import chained_cycles
from segroute.routing import clear_router_cache

def grid(w):
    edges = []
    for r in range(w):
        for c in range(w):
            v = r * w + c
            if c + 1 < w: edges.append((v, v + 1, 1 + (v % 3), 1))
            if r + 1 < w: edges.append((v, v + w, 1 + (v % 2), 1))
    return sr.Network("undirected", w * w, tuple(edges))

def brute_instance():
    edges = [(0,1,1,1),(0,2,1,1),(1,3,1,1),(2,4,1,1),(2,5,1,1),(3,6,1,1),(4,6,1,1),(5,6,1,1)]
    return sr.Instance.build("undirected", 7, edges, [(0,6,1),(6,0,1),(1,5,1)], 1)

def timed(fn, repeat):
    fn()  # warm-up (includes jit compilation)
    best = float("inf")
    for _ in range(repeat):
        clear_router_cache()  # time the kernels, not the router caches
        t = time.perf_counter(); out = fn(); best = min(best, time.perf_counter() - t)
    return best, out

REPEAT = int(__import__("sys").argv[1])
res = {"backend": sr.backend()}
net = grid(30)
t, d = timed(lambda: sr.all_pairs_shortest_distances(net), REPEAT)
res["apsp_grid30"] = [t, hashlib.sha1(np.ascontiguousarray(d).tobytes()).hexdigest()[:12]]
inst = brute_instance()
t, r = timed(lambda: sr.solve_brute(inst, count_all=True), REPEAT)
res["brute_count"] = [t, str(r.stats.get("feasible"))]
inst = chained_cycles(60, d=2, k=2)
t, r = timed(lambda: sr.min_total_waypoints(inst), REPEAT)
res["min_waypoints"] = [t, str(r.total)]
print(json.dumps(res))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    if disable:
        env["SEGROUTE_DISABLE_NUMBA"] = "1"
    else:
        env.pop("SEGROUTE_DISABLE_NUMBA", None)
    out = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    print(f"{'workload':<16}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}  agree")
    ok = True
    for key in fast:
        if key == "backend":
            continue
        (tf, hf), (ts, hs) = fast[key], slow[key]
        agree = hf == hs
        ok &= agree
        print(f"{key:<16}{tf:>11.4f}s{ts:>11.4f}s{ts / max(tf, 1e-9):>9.1f}x  {'yes' if agree else 'NO'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
