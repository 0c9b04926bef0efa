"""Segment routing toolkit: ECMP forwarding graphs, feasibility checking and exact solvers."""
from __future__ import annotations

from ._accel import INF, backend
from .model import (
    Demand,
    Edge,
    FormatError,
    Instance,
    Network,
    RoutingScheme,
    SegmentPath,
    parse_instance,
    parse_scheme,
    serialize_instance,
    serialize_scheme,
)
from .routing import (
    ForwardingGraph,
    LoadMap,
    UnreachableError,
    Verdict,
    all_pairs_shortest_distances,
    check_feasible,
    forwarding_graph,
    is_ecmp_free,
    scheme_loads,
)
from .solvers import (
    Limits,
    MLUResult,
    SearchAborted,
    SolveResult,
    min_total_waypoints,
    minimize_mlu,
    solve_backtrack,
    solve_brute,
)

__version__ = "0.1.0"

from . import cactus, reductions  # noqa: E402
from .cactus import is_cactus, solve_unit_cactus  # noqa: E402
