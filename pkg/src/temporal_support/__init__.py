"""Temporal support of sequential and regular expressions over constraints,
for sequence databases whose items appear, change and disappear over time."""

from .catalog import (CategoryInstance, CategoryOccurrence, CategorySchema, Eco,
                      EventTuple, NormalizedToI, encode, expand, resolve_eco)
from .constraints import (DEFAULT_REGISTRY, Constraint, FunctionRegistry,
                          FunctionSpec, eco_satisfies, parse_constraint, rollup,
                          tuple_temporally_satisfies)
from .regexp import (Automaton, compile_re, enumerate_strings, parse_re,
                     re_matches, re_temporal_support)
from .sequences import (EcoList, MatchContext, SatisfyingListSet,
                        SequentialExpression, SupportResult,
                        generate_satisfying_lists, is_t_ordered, join_lists,
                        temporal_match, temporal_support_se, total_match)
from .timecore import (MINUTE, NOW, Granularity, TimeInterval, contains,
                       follows, format_time, parse_time)
from .workspace import Workspace, classic_support, load_workspace, run_query

__version__ = "0.1.0"

__all__ = [
    "CategoryInstance", "CategoryOccurrence", "CategorySchema", "Eco",
    "EventTuple", "NormalizedToI", "encode", "expand", "resolve_eco",
    "DEFAULT_REGISTRY", "Constraint", "FunctionRegistry", "FunctionSpec",
    "eco_satisfies", "parse_constraint", "rollup",
    "tuple_temporally_satisfies", "Automaton", "compile_re",
    "enumerate_strings", "parse_re", "re_matches", "re_temporal_support",
    "EcoList", "MatchContext", "SatisfyingListSet", "SequentialExpression",
    "SupportResult", "generate_satisfying_lists", "is_t_ordered", "join_lists",
    "temporal_match", "temporal_support_se", "total_match", "MINUTE", "NOW",
    "Granularity", "TimeInterval", "contains", "follows", "format_time",
    "parse_time", "Workspace", "classic_support", "load_workspace",
    "run_query",
]
