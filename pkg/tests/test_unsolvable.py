"""Combination synthesis for loops with non-linear cyclic dependencies."""

from fractions import Fraction

import pytest
import sympy

from conftest import BENCHMARKS, load
from exact import enumerate_distributions, expectation
from loopm.errors import NotUnsolvable
from loopm.frontend import parse
from loopm.frontend.analysis import check_restrictions
from loopm.invariants import invariant_basis
from loopm.moments import parse_goal
from loopm.recurrences import MomentEngine
from loopm.simulator import estimate_moment, run_samples
from loopm.solver import N, closed_forms, evaluate_at
from loopm.unsolvable import (candidate_closed_form, find_defective, synth_solvable_loop,
                              synth_solvable_loop_text, synthesize_combinations)

n = N

# a quadratic pair (u, w) like the one in unsolvable.prob, whose combination reads a probabilistic variable y
PROB_PAIR = """\
y = 0
u, w = 1, 3
while true:
  y = y + 1 {1/2} y - 2 {1/3} y
  u = 2u + w**2 + y
  w = 2w - w**2
end
"""
# E(y) grows like 4**n, so the emitted loop has a non-trivial invariant
PROB_PAIR_GEOM = """\
y = 1
u, w = 1, 3
while true:
  y = 8y {1/2} 0
  u = 2u + w**2 + y
  w = 2w - w**2
end
"""
PROB_PAIR_GAUSS = PROB_PAIR.replace("  u = 2u", "  g = Normal(y, 1)\n  x = x + g**2\n  u = 2u").replace(
    "y = 0\n", "x, y = 1, 0\n")


def _choice_gauss_forced():
    src = (BENCHMARKS / "choice_and_gauss.prob").read_text()
    return parse(src.replace("\nend", "\n  y = y*y {1/2} y\nend"))


# -- defective variables --------------------------------------------------------------------

def test_find_defective_examples():
    assert find_defective(load("unsolvable")) == {"x", "y"}
    assert find_defective(load("sensitivity_unsolvable")) == {"u", "w", "x"}
    assert find_defective(load("fibonacci")) == set()


@pytest.mark.parametrize("name", ["unsolvable", "sensitivity_unsolvable", "fibonacci",
                                  "choice_and_gauss", "geometric"])
def test_find_defective_matches_classification(name):
    prog = load(name)
    assert find_defective(prog) == check_restrictions(prog).defective


# -- synthesis ----------------------------------------------------------------------------------

def test_quadratic_pair_candidate():
    (cand,) = synthesize_combinations(load("unsolvable"), 1)
    assert cand.to_json() == {"combination": "x + y", "eigenvalue": "2",
                              "inhomogeneous": "-3*z + 3"}
    assert str(cand) == "E(x + y) satisfies s' = 2*s - 3*z + 3"


def test_sensitivity_cycle_has_no_linear_candidate():
    assert synthesize_combinations(load("sensitivity_unsolvable"), 1) == []


def test_solvable_loop_rejected():
    with pytest.raises(NotUnsolvable):
        synthesize_combinations(load("fibonacci"), 1)


def test_degree_bound_validated():
    with pytest.raises(ValueError):
        synthesize_combinations(load("unsolvable"), 0)


def test_forced_defective_choice_gauss_has_no_candidate():
    # y now feeds y**2 back into itself, which no combination can cancel
    prog = _choice_gauss_forced()
    assert "y" in find_defective(prog)
    for degree in (1, 2):
        assert synthesize_combinations(prog, degree) == []


@pytest.mark.parametrize("text", [None, PROB_PAIR, PROB_PAIR_GAUSS])
def test_candidate_identity(text):
    prog = load("unsolvable") if text is None else parse(text)
    eng = MomentEngine(prog)
    cands = synthesize_combinations(prog, 2)
    assert cands
    for c in cands:
        pushed = eng.update(c.S)
        assert pushed - c.S * c.lam - c.inhomogeneous == 0
        inh_vars = {v for m, _ in c.inhomogeneous.terms()
                    for v, e in zip(eng.variables, m) if e}
        assert not inh_vars & eng.defective


# -- emitted loops ------------------------------------------------------------------------------

PAIR_LOOP = """\
z = 0
s = x0 + y0
while true:
  t = 1 - z
  s = 2*s - 3*z + 3
  z = t
end
"""


def test_quadratic_pair_emitted_loop():
    prog = load("unsolvable")
    (cand,) = synthesize_combinations(prog, 1)
    text = synth_solvable_loop_text(prog, cand)
    assert text == PAIR_LOOP
    assert parse(text) == synth_solvable_loop(prog, cand)


def test_quadratic_pair_closed_form():
    prog = load("unsolvable")
    (cand,) = synthesize_combinations(prog, 1)
    x0, y0 = sympy.symbols("x0 y0")
    want = 2**n * (x0 + y0 + 2) - (-1)**n / 2 - sympy.Rational(3, 2)
    assert sympy.simplify(candidate_closed_form(prog, cand).to_sympy() - want) == 0


def test_probabilistic_input_emits_deterministic_loop():
    prog = parse(PROB_PAIR_GAUSS)
    (cand,) = synthesize_combinations(prog, 1)
    assert str(cand) == "E(u + w) satisfies s' = 2*s + y - 1/6"
    emitted = synth_solvable_loop(prog, cand)
    text = synth_solvable_loop_text(prog, cand)
    assert "{" not in text and "Normal" not in text
    assert set(emitted.variables) == {"s", "y", "t"}
    assert not find_defective(emitted)
    assert parse(text) == emitted


# -- transfer to the original loop ---------------------------------------------------------------

def test_simulation_transfer_deterministic():
    prog = load("unsolvable")
    (cand,) = synthesize_combinations(prog, 1)
    cf = candidate_closed_form(prog, cand)
    binds = {"x0": 0, "y0": 0}
    traces = run_samples(prog, 10, 1, seed=3, bindings=binds)
    for k in range(11):
        est_x, _ = estimate_moment(traces, parse_goal("E(x)"), k)
        est_y, _ = estimate_moment(traces, parse_goal("E(y)"), k)
        assert Fraction(est_x + est_y) == evaluate_at(cf, k, binds)


def test_simulation_transfer_probabilistic():
    prog = parse(PROB_PAIR_GAUSS)
    (cand,) = synthesize_combinations(prog, 1)
    cf = candidate_closed_form(prog, cand)
    traces = run_samples(prog, 4, 100_000, seed=5)
    i, j = traces.variables.index("u"), traces.variables.index("w")
    for k in range(5):
        total = traces.data[k, :, i] + traces.data[k, :, j]
        se = total.std(ddof=1) / len(total) ** 0.5
        assert abs(total.mean() - float(evaluate_at(cf, k))) <= 3 * se + 1e-9, k


def test_exact_transfer_probabilistic():
    prog = parse(PROB_PAIR)
    (cand,) = synthesize_combinations(prog, 1)
    cf = candidate_closed_form(prog, cand)
    dists = enumerate_distributions(prog, 8)
    iu, iw = prog.variables.index("u"), prog.variables.index("w")
    for k in range(9):
        val = sum(w * (s[iu] + s[iw]) for s, w in dists[k].items())
        assert val == evaluate_at(cf, k)


def _emitted_basis(prog, cand):
    emitted = synth_solvable_loop(prog, cand)
    keep = [v for v in emitted.variables if v != "t"]
    goals = [parse_goal(f"E({v})") for v in keep]
    _, _, cfs = closed_forms(emitted, goals)
    return invariant_basis({str(g): cfs[g] for g in goals}), keep


@pytest.mark.parametrize("text, binds", [
    (None, {"x0": 1, "y0": 2}),
    (None, {"x0": 0, "y0": -1}),
    (PROB_PAIR_GEOM, {}),
])
def test_invariant_transfer(text, binds):
    prog = load("unsolvable") if text is None else parse(text)
    (cand,) = synthesize_combinations(prog, 1)
    basis, keep = _emitted_basis(prog, cand)
    assert basis.generators
    dists = enumerate_distributions(prog, 8, binds)
    S = sympy.sympify(str(cand.S.as_expr()))
    exps = {v: tuple(int(u == v) for u in prog.variables) for v in prog.variables}
    for k in range(9):
        env = {sympy.Symbol(p): sympy.Rational(v) for p, v in binds.items()}
        for v in keep:
            if v == "s":
                terms = sympy.Poly(S, *[sympy.Symbol(u) for u in prog.variables]).terms()
                value = sum(Fraction(int(c.p), int(c.q)) * expectation(dists[k], prog.variables, m)
                            for m, c in terms)
            else:
                value = expectation(dists[k], prog.variables, exps[v])
            env[sympy.Symbol(f"E({v})")] = sympy.Rational(value.numerator, value.denominator)
        for g in basis.to_sympy():
            assert sympy.simplify(g.subs(env)) == 0, (k, g)
