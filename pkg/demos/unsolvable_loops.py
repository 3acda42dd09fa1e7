"""Loops with non-linear cycles: combination synthesis and sensitivity recurrences.

    python demos/unsolvable_loops.py
"""

from pathlib import Path

from loopm.errors import DefectiveDependency
from loopm.frontend import parse_file
from loopm.moments import parse_goal
from loopm.sensitivity import param_independent_vars, solve_sensitivity
from loopm.solver import closed_forms
from loopm.unsolvable import (candidate_closed_form, find_defective, synth_solvable_loop_text,
                              synthesize_combinations)

BENCHMARKS = Path(__file__).resolve().parent.parent / "benchmarks"


def synthesis():
    prog = parse_file(BENCHMARKS / "unsolvable.prob")
    print((BENCHMARKS / "unsolvable.prob").read_text())
    print("defective variables:", sorted(find_defective(prog)))
    try:
        closed_forms(prog, [parse_goal("E(x)")])
    except DefectiveDependency as err:
        print("E(x) has no closed form:", err)
    for cand in synthesize_combinations(prog, 1):
        print("\n" + str(cand))
        print(f"E({cand.S.as_expr()}) = {candidate_closed_form(prog, cand).render()}")
        print("solvable loop for the combination:")
        print(synth_solvable_loop_text(prog, cand))


def sensitivity():
    path = BENCHMARKS / "sensitivity_unsolvable.prob"
    prog = parse_file(path)
    print(path.read_text())
    print("independent of p:", sorted(param_independent_vars(prog, "p")))
    d = solve_sensitivity(prog, parse_goal("E(u)"), "p")
    print(f"d/dp E(u) = {d.render()}")


if __name__ == "__main__":
    synthesis()
    sensitivity()
