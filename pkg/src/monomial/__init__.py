"""Exact series solutions of linear ODEs by splitting them as F(D) + P, D = x d/dx."""

from .catalog import ComparisonReport, build, compare, families, oracle_coefficients, periodic_sum_formula
from .core import (
    ASCENDING,
    DESCENDING,
    DiagonalOp,
    GeneralizedSeries,
    MixedOp,
    OpTerm,
    Poly,
    apply_diagonal,
    apply_inverse_diagonal,
    apply_mixed,
    apply_op_term,
)
from .dsl import OdeSource, parse_ode
from .errors import (
    DepthExhausted,
    MissingParameter,
    MonomialError,
    NegativeBaseFractionalPower,
    NoDiagonalPart,
    NonlinearTerm,
    NonRationalIndicialRoot,
    ParseError,
    ResonanceEncountered,
    SingularPoint,
    UnboundParameter,
    UnknownFamily,
)
from .normal_form import LinearODE, OperatorSplit, reciprocal_transform, suggest_shift, to_operator_form
from .solver import (
    SolveConfig,
    Solution,
    evaluate_series,
    indicial_roots,
    residual_numeric,
    solve_all,
    solve_homogeneous,
    solve_with_source,
    verify_residual_symbolic,
)

__all__ = [
    "apply_diagonal",
    "apply_inverse_diagonal",
    "apply_mixed",
    "apply_op_term",
    "ASCENDING",
    "build",
    "compare",
    "ComparisonReport",
    "DepthExhausted",
    "DESCENDING",
    "DiagonalOp",
    "evaluate_series",
    "families",
    "GeneralizedSeries",
    "indicial_roots",
    "LinearODE",
    "MissingParameter",
    "MixedOp",
    "MonomialError",
    "NegativeBaseFractionalPower",
    "NoDiagonalPart",
    "NonlinearTerm",
    "NonRationalIndicialRoot",
    "OdeSource",
    "OperatorSplit",
    "OpTerm",
    "oracle_coefficients",
    "parse_ode",
    "ParseError",
    "periodic_sum_formula",
    "Poly",
    "reciprocal_transform",
    "residual_numeric",
    "ResonanceEncountered",
    "SingularPoint",
    "Solution",
    "solve_all",
    "solve_homogeneous",
    "solve_with_source",
    "SolveConfig",
    "suggest_shift",
    "to_operator_form",
    "UnboundParameter",
    "UnknownFamily",
    "verify_residual_symbolic",
]

__version__ = "0.1.0"
