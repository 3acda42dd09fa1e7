"""Exact moment analysis of probabilistic while-loops.

Typical use::

    from loopm import parse_file, parse_goal, closed_forms
    ast = parse_file("benchmarks/random_walk_2d.prob")
    _, _, forms = closed_forms(ast, [parse_goal("E(x**2)")])
"""

from .errors import AnalysisError
from .frontend import check_restrictions, normalize, parse, parse_file, pretty
from .invariants import InvariantBasis, invariant_basis, membership_check
from .limits import DEFAULT_LIMITS, Limits
from .moments import MomentGoal, parse_goal
from .recurrences import extract_recurrences
from .sensitivity import diff_closed_form, sensitivity, solve_sensitivity
from .simulator import estimate_moment, run_samples
from .solver import ExpPoly, closed_forms, evaluate_at, limit_at_infinity, solve_cfinite
from .unsolvable import find_defective, synth_solvable_loop, synthesize_combinations

__version__ = "0.1.0"

__all__ = [
    "AnalysisError", "check_restrictions", "normalize", "parse", "parse_file", "pretty",
    "InvariantBasis", "invariant_basis", "membership_check", "DEFAULT_LIMITS", "Limits",
    "MomentGoal", "parse_goal", "extract_recurrences", "diff_closed_form", "sensitivity",
    "solve_sensitivity", "estimate_moment", "run_samples", "ExpPoly", "closed_forms",
    "evaluate_at", "limit_at_infinity", "solve_cfinite", "find_defective",
    "synth_solvable_loop", "synthesize_combinations",
]
