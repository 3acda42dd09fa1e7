"""Raw moments of distributions and moment conversions."""

import math
import random

import pytest
import sympy
from scipy import integrate, stats

from loopm.errors import UnsupportedMoment
from loopm.frontend.ast import Draw
from loopm.moments import (CENTRAL, CUMULANT, RAW, MomentGoal, central_from_raw, cumulant_from_raw,
                           parse_goal, raw_moment)

p, lam = sympy.symbols("p lam")
m1, m2, m3 = sympy.symbols("m1 m2 m3")


def test_bernoulli_any_order():
    for k in range(1, 7):
        assert raw_moment(Draw("Bernoulli", (p,)), k) == p


def test_standard_normal_second_moment():
    assert raw_moment(Draw("Normal", (0, 1)), 2) == 1


def test_exponential_third_moment_matches_integral():
    x = sympy.Symbol("x", positive=True)
    rate = sympy.Symbol("lam", positive=True)
    oracle = sympy.integrate(x**3 * rate * sympy.exp(-rate * x), (x, 0, sympy.oo))
    assert sympy.simplify(raw_moment(Draw("Exponential", (rate,)), 3) - oracle) == 0
    assert raw_moment(Draw("Exponential", (lam,)), 3) == 6 / lam**3


def test_normal_variance_parametrization():
    # second argument is the variance
    assert raw_moment(Draw("Normal", (0, 2)), 2) == 2
    assert raw_moment(Draw("Normal", (0, 2)), 4) == 12


def test_truncnormal_rejected():
    with pytest.raises(UnsupportedMoment):
        raw_moment(Draw("TruncNormal", (0, 1, -1, 1)), 2)


def test_central_from_raw():
    assert central_from_raw([m1, m2]) == m2 - m1**2
    assert central_from_raw([m1]) == 0
    assert sympy.expand(central_from_raw([m1, m2, m3]) - (m3 - 3 * m2 * m1 + 2 * m1**3)) == 0


def test_cumulants():
    assert cumulant_from_raw([m1]) == m1
    assert sympy.expand(cumulant_from_raw([m1, m2]) - (m2 - m1**2)) == 0
    assert sympy.expand(cumulant_from_raw([m1, m2, m3]) - central_from_raw([m1, m2, m3])) == 0


def test_kappa2_equals_c2():
    assert sympy.expand(cumulant_from_raw([m1, m2]) - central_from_raw([m1, m2])) == 0


def test_central_translation_invariance():
    c = sympy.Symbol("c")
    mu1, mu2 = sympy.symbols("mu1 mu2")
    shifted = [mu1 + c, mu2 + 2 * c * mu1 + c**2]
    assert sympy.expand(central_from_raw(shifted) - central_from_raw([mu1, mu2])) == 0


def test_fourth_cumulant_of_normal_vanishes():
    raw = [raw_moment(Draw("Normal", (sympy.Symbol("mu"), sympy.Symbol("s2"))), k)
           for k in range(1, 5)]
    assert sympy.expand(cumulant_from_raw(raw)) == 0


def test_goal_parsing():
    assert parse_goal("V(x)") == MomentGoal(CENTRAL, 2, (("x", 1),))
    assert parse_goal("E(x**2*y)") == MomentGoal(RAW, 1, (("x", 2), ("y", 1)))
    assert parse_goal("k3(y)") == MomentGoal(CUMULANT, 3, (("y", 1),))
    assert str(parse_goal("c2(x)")) == "c2(x)"
    with pytest.raises(ValueError):
        parse_goal("Q(x)")


# -- numeric oracle ------------------------------------------------------------------------

def _instances(rng):
    """(distribution name, args, numeric k-th moment) for random parameters."""
    out = []
    for _ in range(5):
        a = sympy.Rational(rng.randint(1, 9), rng.randint(1, 5))
        b = a + sympy.Rational(rng.randint(1, 9), rng.randint(1, 5))
        mu = sympy.Rational(rng.randint(-9, 9), rng.randint(1, 4))
        pr = sympy.Rational(rng.randint(1, 9), 10)
        shape = sympy.Rational(rng.randint(2, 12), rng.randint(1, 3))
        out += [
            ("Bernoulli", (pr,), lambda k, pr=pr: float(pr)),
            ("Categorical", (pr / 2, pr / 2, 1 - pr),
             lambda k, pr=pr: sum(i**k * w for i, w in enumerate((pr / 2, pr / 2, 1 - pr)))),
            ("DiscreteUniform", (int(mu), int(mu) + 3),
             lambda k, mu=mu: sum(v**k for v in range(int(mu), int(mu) + 4)) / 4),
            ("Uniform", (a, b), lambda k, a=a, b=b: integrate.quad(
                lambda x: x**k / float(b - a), float(a), float(b), epsrel=1e-13)[0]),
            ("Normal", (mu, a), lambda k, mu=mu, a=a: integrate.quad(
                lambda x: x**k * stats.norm.pdf(x, float(mu), math.sqrt(float(a))),
                -math.inf, math.inf, epsabs=1e-13, epsrel=1e-13)[0]),
            ("Laplace", (mu, a), lambda k, mu=mu, a=a: sum(integrate.quad(
                lambda x: x**k * stats.laplace.pdf(x, float(mu), float(a)), lo, hi,
                epsabs=1e-13, epsrel=1e-13)[0] for lo, hi in ((-math.inf, float(mu)),
                                                             (float(mu), math.inf)))),
            ("Exponential", (a,), lambda k, a=a: integrate.quad(
                lambda x: x**k * float(a) * math.exp(-float(a) * x), 0, math.inf,
                epsrel=1e-13)[0]),
            ("Gamma", (shape, a), lambda k, shape=shape, a=a: integrate.quad(
                lambda x: x**k * stats.gamma.pdf(x, float(shape), scale=1 / float(a)), 0,
                math.inf, epsrel=1e-13, limit=200)[0]),
            ("Beta", (shape, a + 1), lambda k, shape=shape, a=a: integrate.quad(
                lambda x: x**k * stats.beta.pdf(x, float(shape), float(a + 1)), 0, 1,
                epsrel=1e-13)[0]),
        ]
    return out


@pytest.mark.parametrize("k", range(1, 7))
def test_raw_moments_against_quadrature(k):
    rng = random.Random(1000 + k)
    for name, args, oracle in _instances(rng):
        exact = float(raw_moment(Draw(name, args), k))
        numeric = float(oracle(k))
        assert math.isclose(exact, numeric, rel_tol=1e-9, abs_tol=1e-9), (name, args, k)
