"""Command-line front end: check, solve, mlu, gen and info.

Exit codes
----------
check: 0 feasible, 1 infeasible, 2 input error
solve: 0 yes, 1 no, 3 aborted, 2 input error
mlu, gen, info: 0 success, 2 input error
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import networkx as nx

from . import reductions as red
from .cactus import (
    NotUnitError,
    build_skeleton,
    is_cactus_forest,
    solve_unit_cactus,
    to_nx,
)
from .model import (
    FormatError,
    Instance,
    parse_instance,
    parse_scheme,
    serialize_instance,
    serialize_scheme,
)
from .routing import UnreachableError, check_feasible
from .solvers import Limits, minimize_mlu, solve_backtrack, solve_brute

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_ABORTED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_instance(path: str) -> tuple[Instance, str]:
    text = _read(path)
    try:
        return parse_instance(text), text
    except FormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _limits(args) -> Limits:
    return Limits(max_nodes=args.max_nodes, time_limit=args.time_limit, threads=args.threads)


# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    inst, _ = _load_instance(args.instance)
    text = _read(args.scheme)
    try:
        scheme = parse_scheme(text, inst)
        verdict = check_feasible(inst, scheme)
    except FormatError as exc:
        raise InputError(f"{args.scheme}: {exc}") from None
    except UnreachableError as exc:
        raise InputError(str(exc)) from None
    print(verdict.describe())
    if args.loads:
        sys.stdout.write(verdict.loads.to_text())
    return EXIT_OK if verdict.feasible else EXIT_NO


def _is_unit_cactus(inst: Instance) -> bool:
    return inst.is_unit() and is_cactus_forest(inst.network)


def cmd_solve(args) -> int:
    inst, _ = _load_instance(args.instance)
    algo = args.algorithm
    if algo == "auto":
        algo = "cactus" if _is_unit_cactus(inst) else "backtrack"
    _err(f"algorithm: {algo}")
    try:
        if algo == "cactus":
            if inst.network.mode != "undirected" or not is_cactus_forest(inst.network):
                raise InputError("cactus algorithm needs an undirected cactus network")
            result = solve_unit_cactus(inst)
        elif algo == "brute":
            result = solve_brute(inst, _limits(args))
        else:
            result = solve_backtrack(inst, _limits(args))
    except NotUnitError as exc:
        raise InputError(str(exc)) from None
    except UnreachableError as exc:
        raise InputError(str(exc)) from None
    _err(f"explored: {result.explored}")
    if result.reason:
        _err(f"reason: {result.reason}")
    print(result.status)
    if result.yes:
        _write(args.output, serialize_scheme(result.scheme))
        return EXIT_OK
    return EXIT_ABORTED if result.status == "aborted" else EXIT_NO


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def cmd_mlu(args) -> int:
    inst, _ = _load_instance(args.instance)
    try:
        eps = Fraction(args.eps)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad --eps {args.eps!r}") from None
    if eps <= 0:
        raise InputError("--eps must be positive")
    try:
        res = minimize_mlu(inst, args.mode, eps, _limits(args))
    except UnreachableError as exc:
        raise InputError(str(exc)) from None
    if res.value is not None:
        print(f"mlu {_frac(res.value)}")
    else:
        print(f"mlu-interval {_frac(res.lo)} {_frac(res.hi)}")
        _err(f"bisection steps: {res.iterations}")
    _write(args.output, serialize_scheme(res.scheme))
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _edge_list(text: str) -> tuple[tuple[int, int], ...]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            a, b = tok.split("-")
            out.append((int(a), int(b)))
        except ValueError:
            raise InputError(f"bad edge {tok!r}; use u-v") from None
    return tuple(out)


def _vertex_count(args, edges) -> int:
    if args.n is not None:
        return args.n
    return 1 + max((max(e) for e in edges), default=-1)


def _terminals(args) -> tuple[int, int, int, int]:
    t = _int_list(args.terminals)
    if len(t) != 4:
        raise InputError("--terminals needs s1,t1,s2,t2")
    return t


def _build_source(args):
    kind = args.reduction
    if kind == "2edp":
        arcs = _edge_list(args.graph)
        return red.EDP2(_vertex_count(args, arcs), arcs, *_terminals(args))
    if kind == "2d1sp":
        edges = _edge_list(args.graph)
        return red.D1SP2(_vertex_count(args, edges), edges, *_terminals(args))
    if kind == "mcc":
        edges = _edge_list(args.graph)
        colors = _int_list(args.colors)
        return red.MCC(len(colors), edges, max(colors, default=0), colors)
    if kind == "3ec":
        edges = _edge_list(args.graph)
        return red.EC3(_vertex_count(args, edges), edges)
    if kind == "binpacking":
        return red.BinPacking(_int_list(args.items), args.bins, args.cap)
    if kind == "3partition":
        vals = _int_list(args.values)
        bound = args.bound if args.bound is not None else (3 * sum(vals) // len(vals) if vals else 0)
        return red.ThreePartition(vals, bound)
    raise InputError(f"unknown reduction {kind!r}")


_REDUCERS = {
    "2edp": lambda s, a: red.reduce_2edp(s),
    "2d1sp": lambda s, a: red.reduce_2d1sp(s),
    "mcc": lambda s, a: red.reduce_mcc(s, a.mode),
    "3ec": lambda s, a: red.reduce_3ec(s),
    "binpacking": lambda s, a: red.reduce_binpacking(s, a.mode),
    "3partition": lambda s, a: red.reduce_3partition(s, a.mode),
}


def _emit(args, inst: Instance, comments, map_lines) -> None:
    _write(args.output, serialize_instance(inst, comments))
    map_path = args.map
    if map_path is None and args.output not in (None, "-"):
        map_path = str(args.output) + ".map"
    if map_path and map_lines:
        Path(map_path).write_text("".join(f"# {line}\n" for line in map_lines))
        _err(f"annotations: {map_path}")


def cmd_gen(args) -> int:
    if args.reduction == "cactus-random":
        inst = red.random_unit_cactus(args.seed, args.n, args.cycles, args.d, args.k)
        comments = [f"random unit cactus seed={args.seed} n={args.n} cycles={args.cycles} d={args.d} k={args.k}"]
        _emit(args, inst, comments, [])
        return EXIT_OK
    if args.reduction == "chained-cycles":
        inst = red.chained_cycles(args.n, args.d, args.k, args.cycle_len, args.seed)
        _emit(args, inst, [f"chained cycles n={args.n} d={args.d} k={args.k}"], [])
        return EXIT_OK
    try:
        src = _build_source(args)
        out = _REDUCERS[args.reduction](src, args)
    except (red.InvalidSource, ValueError, nx.NetworkXException) as exc:
        raise InputError(f"invalid {args.reduction} parameters: {exc}") from None
    comments = [f"reduction {args.reduction}"]
    cover = out.annotations.get("vertex-cover")
    if cover:
        comments.append("vertex-cover " + " ".join(map(str, cover)))
    _emit(args, out.instance, comments, out.map_lines())
    return EXIT_OK


# ---------------------------------------------------------------------------
# info


def _cover_annotation(text: str):
    for line in text.splitlines():
        parts = line.lstrip("#").split()
        if line.startswith("#") and parts and parts[0] == "vertex-cover":
            try:
                return [int(x) for x in parts[1:]]
            except ValueError:
                return None
    return None


def cmd_info(args) -> int:
    inst, text = _load_instance(args.instance)
    net = inst.network
    g = to_nx(net)
    connected = net.n > 0 and nx.is_connected(g)
    print(f"mode: {net.mode}")
    print(f"vertices: {net.n}")
    print(f"edges: {net.m}")
    print(f"demands: {inst.d}")
    print(f"budget: {inst.k}")
    print(f"unit: {'yes' if inst.is_unit() else 'no'}")
    print(f"connected: {'yes' if connected else 'no'}")
    cactus = is_cactus_forest(net)
    print(f"cactus: {'yes' if cactus else 'no'}")
    skel = None
    if cactus and connected:
        skel = build_skeleton(net)
        print(f"blocks: {len(skel.blocks)}")
        print(f"cycles: {len(skel.cycles)}")
        print(f"grafts: {len(skel.grafts)}")
        print(f"hinges: {len(skel.hinges)}")
    cover = _cover_annotation(text)
    if cover is not None:
        cset = set(cover)
        ok = all(v < net.n for v in cset) and all(u in cset or v in cset for u, v, _w, _c in net.edges)
        if ok:
            print(f"vertex-cover: <= {len(cset)} (witness {' '.join(map(str, sorted(cset)))})")
        else:
            print("vertex-cover: annotation is not a vertex cover")
    if args.dump_skeleton:
        if skel is None:
            _err("no skeleton: the network is not a connected cactus")
        else:
            sys.stdout.write(skel.dump())
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_limits(p) -> None:
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--max-nodes", type=int, default=10**8, help="search node limit")
    p.add_argument("--time-limit", type=float, default=60.0, help="seconds before aborting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="segroute", description="Segment routing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check a routing scheme against an instance")
    p.add_argument("instance")
    p.add_argument("scheme")
    p.add_argument("--loads", action="store_true", help="print every edge load")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="decide an instance and print a witness scheme")
    p.add_argument("instance")
    p.add_argument("--algorithm", choices=("brute", "backtrack", "cactus", "auto"), default="auto")
    p.add_argument("-o", "--output", help="scheme output file (default stdout)")
    _add_limits(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mlu", help="minimise the maximum link utilisation")
    p.add_argument("instance")
    p.add_argument("--mode", choices=("exact", "binary"), default="exact")
    p.add_argument("--eps", default="1/1000", help="bracket width for binary mode")
    p.add_argument("-o", "--output", help="scheme output file (default stdout)")
    _add_limits(p)
    p.set_defaults(func=cmd_mlu)

    p = sub.add_parser("gen", help="generate a reduction or random instance")
    p.add_argument(
        "reduction",
        choices=tuple(_REDUCERS) + ("cactus-random", "chained-cycles"),
    )
    p.add_argument("-o", "--output", help="instance output file (default stdout)")
    p.add_argument("--map", help="annotation sidecar file (default <output>.map)")
    p.add_argument("--mode", default="undirected", choices=("undirected", "bidirected", "directed"))
    p.add_argument("--graph", default="", help="edge list u-v,u-v,...")
    p.add_argument("--n", type=int, default=None, help="vertex count")
    p.add_argument("--terminals", default="", help="s1,t1,s2,t2")
    p.add_argument("--colors", default="", help="colour per vertex (1-based)")
    p.add_argument("--items", default="", help="item sizes")
    p.add_argument("--bins", type=int, default=0)
    p.add_argument("--cap", type=int, default=1)
    p.add_argument("--values", default="", help="3-partition elements")
    p.add_argument("--bound", type=int, default=None, help="3-partition group sum")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--cycles", type=int, default=None)
    p.add_argument("--d", type=int, default=2, help="demand count for random families")
    p.add_argument("--k", type=int, default=1, help="budget for random families")
    p.add_argument("--cycle-len", type=int, default=4)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("info", help="describe an instance")
    p.add_argument("instance")
    p.add_argument("--dump-skeleton", action="store_true")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and args.reduction in ("cactus-random", "chained-cycles"):
        if args.n is None:
            parser.error(f"{args.reduction} needs --n")
        if args.reduction == "cactus-random" and args.seed is None:
            parser.error("cactus-random needs --seed")
    try:
        return args.func(args)
    except InputError as exc:
        _err(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
