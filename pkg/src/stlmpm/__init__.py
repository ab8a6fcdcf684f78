"""Model-predictive online monitoring of STL formulas with nested temporal operators."""

from .errors import (AlreadyConcluded, ConfigError, DimensionMismatch, FormulaSyntaxError,
                     FragmentError, HorizonError, IntervalOrderError, MonitorError,
                     NegatedTemporalError, OutOfDomain, ResourceLimit, TrajectoryTooShort,
                     UnknownPredicate)
from .feasible import FeasibleTable, feasible_set, precompute_all
from .formula import (BoxPredicate, LinearPredicate, compile_formula, desugar, parse,
                      predicate_region, to_nnf, to_text)
from .monitor import MonitorState, Verdict, observe, start
from .oracle import PrefixOracle, classify_prefix, eval_stl
from .system import GridSpec, StateSet, SystemModel, build_model, one_step_feasible
from .tree import SyntaxTree, build_tree, formula_horizon, horizon
from .vectors import (BasicSet, Status, consistent_region, induce, init_basic, root_status,
                      successors, update)

__version__ = "0.1.0"

__all__ = [
    "AlreadyConcluded",
    "BasicSet",
    "BoxPredicate",
    "ConfigError",
    "DimensionMismatch",
    "FeasibleTable",
    "FormulaSyntaxError",
    "FragmentError",
    "GridSpec",
    "HorizonError",
    "IntervalOrderError",
    "LinearPredicate",
    "MonitorError",
    "MonitorState",
    "NegatedTemporalError",
    "OutOfDomain",
    "PrefixOracle",
    "ResourceLimit",
    "StateSet",
    "Status",
    "SyntaxTree",
    "SystemModel",
    "TrajectoryTooShort",
    "UnknownPredicate",
    "Verdict",
    "build_model",
    "build_tree",
    "classify_prefix",
    "compile_formula",
    "consistent_region",
    "desugar",
    "eval_stl",
    "feasible_set",
    "formula_horizon",
    "horizon",
    "induce",
    "init_basic",
    "observe",
    "one_step_feasible",
    "parse",
    "precompute_all",
    "predicate_region",
    "root_status",
    "start",
    "successors",
    "to_nnf",
    "to_text",
    "update",
]
