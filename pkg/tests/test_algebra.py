"""Coefficient fields, Groebner bases, elimination, Hilbert bases and linear solving."""

import itertools

import pytest
import sympy
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from sympy import QQ

from loopm.algebra import (DEGREVLEX, LEX, DioSystem, Ideal, MonomialOrder, Surd, coeff_field,
                           eliminate_vars, format_poly, groebner_basis, hilbert_basis_nat,
                           is_groebner, is_member, normal_form, nullspace, solve_linear)
from loopm.algebra.groebner import s_polynomial
from loopm.errors import NoSolution, ResourceLimit
from loopm.limits import Limits

NXY = ("n", "x", "y")


def ring(names, order=LEX):
    R = MonomialOrder(order, names).ring()
    return R, R.gens


# -- Groebner bases -------------------------------------------------------------------

def test_cubic_curve_groebner_basis_byte_exact():
    _, (n, x, y) = ring(NXY)
    G = groebner_basis([x - n**2 + 1, y - n**3 - n], MonomialOrder(LEX, NXY))
    assert [format_poly(g) for g in G] == [
        "n**2 - x - 1", "n*x + 2*n - y", "n*y - x**2 - 3*x - 2",
        "x**3 + 5*x**2 + 8*x - y**2 + 4"]


def test_principal_ideal():
    _, (x,) = ring(("x",))
    assert groebner_basis([x], MonomialOrder(LEX, ("x",))) == [x]


def test_redundant_generator_collapses():
    _, (x,) = ring(("x",))
    assert [format_poly(g) for g in groebner_basis([x**2 - 1, x - 1], MonomialOrder(LEX, ("x",)))] \
        == ["x - 1"]


def test_inconsistent_ideal_is_one():
    _, (x, y) = ring(("x", "y"))
    G = groebner_basis([x * y - 1, x], MonomialOrder(LEX, ("x", "y")))
    assert [format_poly(g) for g in G] == ["1"]


def test_pair_limit_reported():
    _, (n, x, y) = ring(NXY)
    gens = [x - n**2 + 1, y - n**3 - n]
    with pytest.raises(ResourceLimit):
        groebner_basis(gens, MonomialOrder(LEX, NXY), Limits(max_pairs=2))
    assert len(groebner_basis(gens, MonomialOrder(LEX, NXY), Limits(max_pairs=4))) == 4


def test_groebner_over_parameter_field():
    K = coeff_field(("p",))
    R = MonomialOrder(LEX, ("x", "y")).ring(K.domain)
    x, y = R.gens
    p = R(K.param("p"))
    G = groebner_basis([x - p * y, x * y - 1], MonomialOrder(LEX, ("x", "y")))
    assert all(is_member(g, G) for g in (x - p * y, x * y - 1))
    assert is_groebner(G)


# -- elimination -------------------------------------------------------------------------

def test_eliminate_cubic_curve():
    _, (n, x, y) = ring(NXY)
    I = eliminate_vars(Ideal([x - n**2 + 1, y - n**3 - n], NXY), {"n"})
    assert [format_poly(g) for g in I.generators] == ["x**3 + 5*x**2 + 8*x - y**2 + 4"]
    assert I.variables == ("x", "y")


def test_eliminate_substitution():
    _, (n, x, y) = ring(NXY)
    I = eliminate_vars(Ideal([x - n, y - n], NXY), {"n"})
    assert [format_poly(g) for g in I.generators] == ["x - y"]


def test_eliminate_exponential_pair():
    names = ("n", "a", "b", "x", "y")
    _, (n, a, b, x, y) = ring(names)
    I = eliminate_vars(Ideal([x - n * a, y - n**2 * b, a**2 - b], names), {"n", "a", "b"})
    assert [format_poly(g) for g in I.generators] == ["x**2 - y"]


def test_eliminate_rejects_unknown_variable():
    _, (n, x, y) = ring(NXY)
    with pytest.raises(ValueError):
        eliminate_vars(Ideal([x - n], NXY), {"t"})


# -- Groebner properties against an independent oracle --------------------------------------

VARS3 = ("x", "y", "z")
_, GENS3 = ring(VARS3)


@st.composite
def small_polys(draw):
    nvars = draw(st.integers(1, 3))
    gens = GENS3[:nvars]
    terms = draw(st.lists(
        st.tuples(st.integers(-3, 3), st.tuples(*[st.integers(0, 3)] * nvars)),
        min_size=1, max_size=3))
    f = GENS3[0].ring.zero
    for c, exps in terms:
        if sum(exps) > 3:
            continue
        m = GENS3[0].ring.one
        for g, e in zip(gens, exps):
            m *= g**e
        f += c * m
    return f


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(small_polys(), min_size=1, max_size=3), st.sampled_from([LEX, DEGREVLEX]))
def test_groebner_matches_sympy(gens, kind):
    gens = [g for g in gens if g]
    if not gens:
        return
    order = MonomialOrder(kind, VARS3)
    G = groebner_basis(gens, order)
    R = order.ring()
    syms = sympy.symbols(VARS3)
    ref = sympy.groebner([g.as_expr() for g in gens], *syms, domain=QQ,
                          order="grevlex" if kind == DEGREVLEX else "lex")
    assert sorted(format_poly(g) for g in G) == sorted(
        format_poly(R.from_expr(e)) for e in ref.exprs)
    # every generator reduces to zero and every basis element lies in the input ideal
    assert all(not normal_form(g, G) for g in gens)
    assert all(ref.contains(g.as_expr()) for g in G)


@settings(max_examples=40, deadline=None)
@given(st.lists(small_polys(), min_size=1, max_size=3))
def test_s_polynomials_reduce_to_zero(gens):
    gens = [g for g in gens if g]
    if not gens:
        return
    G = groebner_basis(gens, MonomialOrder(DEGREVLEX, VARS3))
    for f, g in itertools.combinations(G, 2):
        assert not s_polynomial(f, g).rem(G)


@settings(max_examples=60, deadline=None)
@given(small_polys(), small_polys(), small_polys())
def test_polynomial_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f


# -- coefficients and surds ----------------------------------------------------------------

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@given(rationals, rationals, st.sampled_from([2, 3, 5, 6, 7, 10]))
def test_surd_norm(a, b, d):
    s = Surd.make(QQ(a.numerator, a.denominator), QQ(b.numerator, b.denominator), d)
    prod = s * s.conjugate() if isinstance(s, Surd) else s * s
    assert prod == QQ(a.numerator, a.denominator)**2 - d * QQ(b.numerator, b.denominator)**2


def test_surd_demotes_to_rational():
    assert Surd.make(QQ(3, 2), QQ(0), 5) == QQ(3, 2)
    assert not isinstance(Surd.make(QQ(3, 2), QQ(0), 5), Surd)


def test_surd_arithmetic():
    phi = Surd.make(QQ(1, 2), QQ(1, 2), 5)
    assert phi * phi == phi + 1
    assert (phi**10 - phi.conjugate()**10) / Surd.make(QQ(0), QQ(1), 5) == 55


def test_coeff_field_params():
    K = coeff_field(("p",))
    p = K.param("p")
    c = (1 - p) / (1 + p)
    assert K.free_params(c) == {"p"}
    assert K.evaluate(c, {"p": QQ(1, 3)}) == QQ(1, 2)
    ps = sympy.Symbol("p")
    assert sympy.simplify(K.to_sympy(K.diff(c, "p")) - sympy.diff((1 - ps) / (1 + ps), ps)) == 0
    assert coeff_field(()).is_constant(K.one) or K.is_constant(K.one)


# -- Hilbert bases ---------------------------------------------------------------------------

def test_hilbert_balance_system():
    assert hilbert_basis_nat(DioSystem.from_rows([[1, -2, -1], [0, 0, -1]])) == [(2, 1, 0)]


def test_hilbert_diagonal():
    assert set(hilbert_basis_nat(DioSystem.from_rows([[1, -1]]))) == {(1, 1)}


def test_hilbert_two_three():
    assert set(hilbert_basis_nat(DioSystem.from_rows([[2, -3]]))) == {(3, 2)}


def test_hilbert_several_minimal_solutions():
    assert set(hilbert_basis_nat(DioSystem.from_rows([[1, 1, -2]]))) == {(2, 0, 1), (1, 1, 1),
                                                                         (0, 2, 1)}


def _box_span(basis, box, m):
    """All natural combinations of ``basis`` with entries <= box."""
    reach = {(0,) * m}
    frontier = list(reach)
    while frontier:
        nxt = []
        for v in frontier:
            for b in basis:
                w = tuple(x + y for x, y in zip(v, b))
                if max(w) <= box and w not in reach:
                    reach.add(w)
                    nxt.append(w)
        frontier = nxt
    return reach


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 3).flatmap(lambda m: st.tuples(
    st.just(m), st.lists(st.lists(st.integers(-3, 3), min_size=m, max_size=m),
                         min_size=1, max_size=2))))
def test_hilbert_box_completeness(data):
    m, rows = data
    system = DioSystem.from_rows(rows)
    basis = hilbert_basis_nat(system)
    box = 6
    brute = {v for v in itertools.product(range(box + 1), repeat=m) if system.is_solution(v)}
    assert all(system.is_solution(b) and any(b) for b in basis)
    assert _box_span(basis, box, m) == brute


# -- linear solving ---------------------------------------------------------------------------

def test_binet_fit():
    phi = Surd.make(QQ(1, 2), QQ(1, 2), 5)
    sol = solve_linear([[QQ(1), QQ(1)], [phi, phi.conjugate()]], [QQ(0), QQ(1)])
    inv_sqrt5 = Surd.make(QQ(0), QQ(1, 5), 5)
    assert sol.unique and sol.values == [inv_sqrt5, -inv_sqrt5]


def test_alternating_fit():
    assert solve_linear([[QQ(1)]], [QQ(1)]).values == [1]


def test_singular_system():
    with pytest.raises(NoSolution):
        solve_linear([[QQ(1), QQ(1)], [QQ(1), QQ(1)]], [QQ(1), QQ(2)])


def test_underdetermined_system_reports_nullspace():
    sol = solve_linear([[QQ(1), QQ(1)]], [QQ(2)])
    assert not sol.unique
    assert sol.values[0] + sol.values[1] == 2
    assert len(sol.nullspace) == 1 and sum(sol.nullspace[0]) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4).flatmap(lambda k: st.tuples(
    st.lists(st.lists(rationals, min_size=k, max_size=k), min_size=k, max_size=k),
    st.lists(rationals, min_size=k, max_size=k))))
def test_solve_linear_satisfies_system(data):
    A, b = data
    A = [[QQ(a.numerator, a.denominator) for a in row] for row in A]
    b = [QQ(a.numerator, a.denominator) for a in b]
    try:
        sol = solve_linear(A, b)
    except NoSolution:
        assert sympy.Matrix(A).rank() < sympy.Matrix([row + [r] for row, r in zip(A, b)]).rank()
        return
    for row, rhs in zip(A, b):
        assert sum(a * x for a, x in zip(row, sol.values)) == rhs
    for v in sol.nullspace:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in A)


def test_nullspace_dimension():
    A = [[QQ(1), QQ(2), QQ(3)], [QQ(2), QQ(4), QQ(6)]]
    assert len(nullspace(A)) == 2
