"""Closed forms, invariants and sensitivities of a 2-D random walk.

    python demos/random_walk.py
"""

from fractions import Fraction
from pathlib import Path

from loopm.frontend import parse_file
from loopm.invariants import invariant_basis
from loopm.moments import parse_goal
from loopm.sensitivity import sensitivity
from loopm.simulator import estimate_moment, run_samples
from loopm.solver import closed_forms, evaluate_at

BENCH = Path(__file__).resolve().parent.parent / "benchmarks" / "random_walk_2d.prob"


def main():
    prog = parse_file(BENCH)
    print(BENCH.read_text())

    goals = [parse_goal(g) for g in ("E(x)", "E(y)", "E(x**2)", "E(y**2)")]
    _, _, cfs = closed_forms(prog, goals)
    for g in goals:
        print(f"{g} = {cfs[g].render()}")

    print("\nmoment invariants:")
    basis = invariant_basis({str(g): cfs[g] for g in goals}, ("p",))
    for line in basis.lines():
        print(" ", line)

    print("\nsensitivities with respect to p:")
    for g in ("V(x)", "V(y)"):
        print(f"  d/dp {g} = {sensitivity(prog, parse_goal(g), 'p').render()}")

    # the simulator is an independent check of the exact answer
    binds = {"p": Fraction(1, 3)}
    traces = run_samples(prog, 10, 100_000, seed=1, bindings=binds)
    g = parse_goal("E(x**2)")
    est, err = estimate_moment(traces, g, 10)
    exact = evaluate_at(cfs[g], 10, binds)
    print(f"\n{g} at n = 10, p = 1/3: exact {exact}, simulated {est:.4f} +- {err:.4f}")


if __name__ == "__main__":
    main()
