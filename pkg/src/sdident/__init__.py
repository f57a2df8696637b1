"""Structural identifiability of spring-dashpot viscoelastic networks.

Parse a series/parallel network of springs and dashpots, derive its
constitutive differential equation exactly, decide local and global
structural identifiability, and cross-check every verdict with an
independent numeric oracle.
"""

from .network import (
    DASHPOT,
    SPRING,
    Element,
    Leaf,
    NetworkExpr,
    Parallel,
    ParseError,
    Series,
    flatten,
    leaves,
    params,
    parse,
    random_network,
    render,
)
from .opalg import (
    ConstitutiveEq,
    DiffOperator,
    InvariantViolation,
    ParamPoly,
    Shape,
    coefficient_map,
    combine_parallel,
    combine_series,
    constitutive,
    equation_to_json,
    eval_operator,
    leaf_equation,
)
from .nettypes import (
    NetType,
    TraceStep,
    classify,
    format_tables,
    predicted_shapes,
    table_parallel,
    table_series,
    type_of,
    type_trace,
)
from .ident import (
    GlobalStatus,
    Quadruple,
    Verdict,
    analyze,
    block_determinant,
    constructible_one_at_a_time,
    exact_det,
    exact_rank,
    factor_matrix,
    factor_matrix_size,
    globally_identifiable,
    good_quadruple,
    local_identifiable,
    nonmonic_count,
    resultant,
    sylvester,
)
from .oracle import (
    CompiledMap,
    FiberReport,
    FiberSolution,
    ParamPoint,
    check_coprimality,
    fiber_solutions,
    jacobian_matrix,
    jacobian_rank,
    jacobian_rank_float,
    sample_point,
    sibling_groups,
    verify_local,
)

__version__ = "0.1.0"

__all__ = [
    "DASHPOT",
    "SPRING",
    "Element",
    "Leaf",
    "NetworkExpr",
    "Parallel",
    "ParseError",
    "Series",
    "flatten",
    "leaves",
    "params",
    "parse",
    "random_network",
    "render",
    "ConstitutiveEq",
    "DiffOperator",
    "InvariantViolation",
    "ParamPoly",
    "Shape",
    "coefficient_map",
    "combine_parallel",
    "combine_series",
    "constitutive",
    "equation_to_json",
    "eval_operator",
    "leaf_equation",
    "NetType",
    "TraceStep",
    "classify",
    "format_tables",
    "predicted_shapes",
    "table_parallel",
    "table_series",
    "type_of",
    "type_trace",
    "GlobalStatus",
    "Quadruple",
    "Verdict",
    "analyze",
    "block_determinant",
    "constructible_one_at_a_time",
    "exact_det",
    "exact_rank",
    "factor_matrix",
    "factor_matrix_size",
    "globally_identifiable",
    "good_quadruple",
    "local_identifiable",
    "nonmonic_count",
    "resultant",
    "sylvester",
    "CompiledMap",
    "FiberReport",
    "FiberSolution",
    "ParamPoint",
    "check_coprimality",
    "fiber_solutions",
    "jacobian_matrix",
    "jacobian_rank",
    "jacobian_rank_float",
    "sample_point",
    "sibling_groups",
    "verify_local",
]
