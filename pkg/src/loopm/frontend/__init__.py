"""Parsing, printing and static analysis of loop programs."""

from .analysis import (UNBOUNDED, DependencyGraph, VarClassification, analyze_supports,
                       check_restrictions, defective_variables, dependency_graph, find_defective,
                       normalize, param_independent_vars)
from .ast import Assign, Ast, BoolConst, BoolOp, Categorical, Compare, Draw, If, Not
from .parser import parse, parse_file
from .printer import pretty

__all__ = [
    "UNBOUNDED", "DependencyGraph", "VarClassification", "analyze_supports",
    "check_restrictions", "defective_variables", "dependency_graph", "find_defective",
    "normalize", "param_independent_vars", "Assign", "Ast", "BoolConst", "BoolOp",
    "Categorical", "Compare", "Draw", "If", "Not", "parse", "parse_file", "pretty",
]
