"""Hardness-reduction generators, gadgets, source oracles and random families."""
from .constructions import (
    SUBPATH_LEN,
    ReductionOutput,
    lift_2d1sp,
    lift_2edp,
    lift_3ec,
    lift_3partition,
    lift_binpacking,
    lift_mcc,
    lift_solution,
    pad_mcc,
    reduce_2d1sp,
    reduce_2edp,
    reduce_3ec,
    reduce_3partition,
    reduce_binpacking,
    reduce_mcc,
)
from .families import chained_cycles, random_cactus_edges, random_unit_cactus
from .gadgets import Builder, chain_bottoms, extend_graph, name_str, triangle_chain
from .sources import (
    EC3,
    EDP2,
    MCC,
    BinPacking,
    D1SP2,
    InvalidSource,
    OracleUnavailable,
    ThreePartition,
    binpacking_feasible,
    binpacking_solutions,
    d1sp2_solutions,
    ec3_solutions,
    edp2_solutions,
    first_solution,
    is_proper_coloring,
    is_valid_packing,
    is_valid_partition,
    mcc_solutions,
    three_partition_feasible,
    three_partition_solutions,
)
