"""Irrational eigenvalues: Binet's formula and Fibonacci identities.

    python demos/fibonacci_identities.py
"""

from pathlib import Path

from loopm.frontend import parse_file
from loopm.invariants import invariant_basis, membership_check
from loopm.moments import parse_goal
from loopm.solver import closed_forms, evaluate_at

BENCH = Path(__file__).resolve().parent.parent / "benchmarks" / "fibonacci.prob"

CANDIDATES = [
    "E(a) + E(b) - E(c)",
    "E(b)**2 - E(b)*E(c) + E(x)",
    "E(z) - E(b)**2 - E(b)*E(c) + E(c)**2",
    "E(z) - E(b)**2 - E(b)*E(c) - E(c)**2",
    "E(b)**4 + 2*E(b)**3*E(c) - E(b)**2*E(c)**2 - 2*E(b)*E(c)**3 + E(c)**4 - 1",
]


def main():
    prog = parse_file(BENCH)
    print(BENCH.read_text())
    goals = [parse_goal(f"E({v})") for v in ("a", "b", "c", "x", "z")]
    _, _, cfs = closed_forms(prog, goals)
    for g in goals:
        print(f"{g} = {cfs[g].render()}")
    print("E(a) for n = 0..10:", [str(evaluate_at(cfs[goals[0]], k)) for k in range(11)])

    basis = invariant_basis({str(g): cfs[g] for g in goals})
    if not basis.complete:
        print("\n(relations among the irrational bases came from a bounded search)")
    print("\nmembership:")
    for text in CANDIDATES:
        print(f"  {'yes' if membership_check(text, basis) else 'no ':3}  {text}")


if __name__ == "__main__":
    main()
