"""Solver and verifier for n-tupled coincidence problems in ordered metric spaces.

The problem: given F mapping n-tuples of points to points, a self-map g,
and an n x n index operation, find tuples (x_1, ..., x_n) with

    F(x_{i star 1}, ..., x_{i star n}) = g(x_i)   for every i,

optionally with g(x_i) = x_i too. The package builds the product-space
reduction, checks the order/contraction hypotheses that guarantee such
points exist, iterates to them on R^k, and enumerates them exactly on
finite spaces.
"""

from ._backend import BACKEND, NUMBA_ENABLED
from .config import ProblemConfig, load_problem_config
from .dsl import MappingAst, ParseError, eval_mapping, format_mapping, parse_mapping
from .errors import ConfigError, EnumerationBoundError, MissingInverseError, StarfixError
from .hypotheses import (
    ComparisonFn,
    ContractionVariant,
    HypothesisReport,
    SamplerConfig,
    check_argumentwise_monotone,
    check_commuting,
    check_contraction,
    check_initial_condition,
    check_monotone_property,
    declare_topological_flags,
    implied_variants,
)
from .index_algebra import (
    StarOp,
    backward_cyclic,
    format_star,
    forward_cyclic,
    is_permuted,
    karapinar_quadruple,
    make_star,
    preset,
    preset_names,
    read_star_file,
    row_projection,
    skew_1,
    skew_n,
)
from .product import (
    InducedMaps,
    ProjectionMetricReport,
    big_g,
    delta_n,
    f_star,
    lemma6_check,
    nabla_n,
    order_leq_n,
    project_star,
    tabulate_induced,
)
from .solver import (
    ProblemSpec,
    SolveConfig,
    SolveReport,
    UniquenessReport,
    enumerate_common_star_fixed,
    enumerate_star_coincidence,
    lemma3_crosscheck,
    parse_f_table_text,
    parse_g_table_text,
    picard_solve,
    read_f_table_file,
    read_g_table_file,
    solve_with_checks,
    standard_checks,
    uniqueness_probe,
    verify_solution,
)
from .spaces import (
    FiniteSpace,
    VectorSpace,
    Violation,
    chain_space,
    comparable,
    format_finite_space,
    parse_finite_space_text,
    random_comparable_pair,
    read_finite_space_file,
    validate_finite_space,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "NUMBA_ENABLED",
    "MappingAst",
    "ParseError",
    "eval_mapping",
    "format_mapping",
    "parse_mapping",
    "StarfixError",
    "ConfigError",
    "EnumerationBoundError",
    "MissingInverseError",
    "ComparisonFn",
    "ContractionVariant",
    "HypothesisReport",
    "SamplerConfig",
    "check_argumentwise_monotone",
    "check_commuting",
    "check_contraction",
    "check_initial_condition",
    "check_monotone_property",
    "declare_topological_flags",
    "implied_variants",
    "StarOp",
    "backward_cyclic",
    "format_star",
    "forward_cyclic",
    "is_permuted",
    "karapinar_quadruple",
    "make_star",
    "preset",
    "preset_names",
    "read_star_file",
    "row_projection",
    "skew_1",
    "skew_n",
    "InducedMaps",
    "ProjectionMetricReport",
    "big_g",
    "delta_n",
    "f_star",
    "lemma6_check",
    "nabla_n",
    "order_leq_n",
    "project_star",
    "tabulate_induced",
    "ProblemSpec",
    "SolveConfig",
    "SolveReport",
    "UniquenessReport",
    "enumerate_common_star_fixed",
    "enumerate_star_coincidence",
    "lemma3_crosscheck",
    "parse_f_table_text",
    "parse_g_table_text",
    "picard_solve",
    "read_f_table_file",
    "read_g_table_file",
    "solve_with_checks",
    "standard_checks",
    "uniqueness_probe",
    "verify_solution",
    "FiniteSpace",
    "VectorSpace",
    "Violation",
    "chain_space",
    "comparable",
    "format_finite_space",
    "parse_finite_space_text",
    "random_comparable_pair",
    "read_finite_space_file",
    "validate_finite_space",
    "ProblemConfig",
    "load_problem_config",
]
