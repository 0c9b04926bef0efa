"""Unit segment routing on cactus graphs."""
from __future__ import annotations

from .cycle import CycleSolution, CycleVerdict, solve_cycle_min
from .skeleton import (
    Block,
    DisconnectedError,
    NotCactusError,
    Skeleton,
    build_skeleton,
    is_cactus,
    is_cactus_forest,
    to_nx,
)
from .dp import (
    DependencyMultigraph,
    NotUnitError,
    PartialSolution,
    RuleOutcome,
    apply_reduction_rules,
    build_dependency_multigraph,
    project_demands,
    solve_unit_cactus,
)
