"""Raw moments of the supported distributions, conversions between raw
moments, central moments and cumulants, and moment-goal parsing."""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import comb, factorial

import sympy

from .errors import UnsupportedMoment
from .frontend.ast import DISTRIBUTIONS

RAW = "E"
CENTRAL = "c"
CUMULANT = "k"


def _double_factorial(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def _standard_normal(j):
    return 0 if j % 2 else _double_factorial(j - 1)


def _standard_laplace(j):
    return 0 if j % 2 else factorial(j)


def _location_scale(mu, std_moment, scale_power, k):
    """E[(mu + s X)^k] given E[X^j] and a function returning s^j."""
    total = sympy.Integer(0)
    for j in range(k + 1):
        m = std_moment(j)
        if m:
            total += comb(k, j) * mu ** (k - j) * scale_power(j) * m
    return sympy.expand(total)


def raw_moment(dist, k: int) -> sympy.Expr:
    """E(X**k) for a draw ``X`` as an exact expression in the distribution's parameters.

    ``dist`` is a :class:`~loopm.frontend.ast.Draw` (its shift is ignored) or
    a ``(name, args)`` pair.

    >>> from sympy import Symbol
    >>> raw_moment(("Exponential", (Symbol("l"),)), 3)
    6/l**3
    """
    name, args = (dist.dist, dist.args) if hasattr(dist, "dist") else dist
    args = tuple(sympy.sympify(a) for a in args)
    if name not in DISTRIBUTIONS:
        raise UnsupportedMoment(f"unknown distribution {name}")
    if k < 0:
        raise ValueError("moment order must be natural")
    if k == 0:
        return sympy.Integer(1)
    if name == "Bernoulli":
        return args[0]
    if name == "Categorical":
        return sympy.expand(sum((i ** k * p for i, p in enumerate(args)), sympy.Integer(0)))
    if name == "DiscreteUniform":
        a, b = args
        if not (a.is_Integer and b.is_Integer) or b < a:
            raise UnsupportedMoment("DiscreteUniform bounds must be integers a <= b")
        return sympy.Rational(sum(v ** k for v in range(int(a), int(b) + 1)), int(b - a + 1))
    if name == "Uniform":
        a, b = args
        return sympy.expand(sum((a ** j * b ** (k - j) for j in range(k + 1)), sympy.Integer(0))
                            / (k + 1))
    if name == "Normal":
        mu, var = args
        return _location_scale(mu, _standard_normal, lambda j: var ** (j // 2), k)
    if name == "Laplace":
        mu, scale = args
        return _location_scale(mu, _standard_laplace, lambda j: scale ** j, k)
    if name == "Exponential":
        (rate,) = args
        return sympy.Integer(factorial(k)) / rate ** k
    if name == "Gamma":
        shape, rate = args
        return sympy.prod([shape + i for i in range(k)]) / rate ** k
    if name == "Beta":
        a, b = args
        return sympy.prod([(a + i) / (a + b + i) for i in range(k)])
    raise UnsupportedMoment(f"{name} moments leave the rational-function coefficient field")


def central_from_raw(raw):
    """Central moment of degree ``d = len(raw)`` from raw moments [E(x), ..., E(x**d)].

    Works on any ring elements supporting ``+``, ``*`` and integer scaling.
    """
    d = len(raw)
    if d == 0:
        raise ValueError("need at least one raw moment")
    m = [1] + list(raw)
    mean = raw[0]
    total = 0
    for j in range(d + 1):
        total = total + comb(d, j) * (-1) ** (d - j) * m[j] * mean ** (d - j)
    return total


def cumulant_from_raw(raw):
    """Cumulant of degree ``len(raw)`` via the moment-cumulant recursion."""
    d = len(raw)
    if d == 0:
        raise ValueError("need at least one raw moment")
    m = [1] + list(raw)
    kappa = [None]
    for n in range(1, d + 1):
        value = m[n]
        for j in range(1, n):
            value = value - comb(n - 1, j - 1) * kappa[j] * m[n - j]
        kappa.append(value)
    return kappa[d]


# -- goals ------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentGoal:
    """``E(M)``, ``cd(M)`` (central) or ``kd(M)`` (cumulant) of a monomial ``M``.

    ``monomial`` is a sorted tuple of (variable, exponent) pairs; the empty
    tuple is the constant 1.
    """

    kind: str
    degree: int
    monomial: tuple

    def __post_init__(self):
        if self.kind not in (RAW, CENTRAL, CUMULANT):
            raise ValueError(f"unknown moment kind {self.kind!r}")
        if self.degree < 1:
            raise ValueError("moment degree must be at least 1")

    @property
    def monomial_text(self):
        return format_monomial(self.monomial)

    def power(self, j):
        """The monomial M**j."""
        return tuple((v, e * j) for v, e in self.monomial)

    @property
    def raw_monomials(self):
        """Monomials whose raw moments determine this goal."""
        if self.kind == RAW:
            return [self.monomial]
        return [self.power(j) for j in range(1, self.degree + 1)]

    def __str__(self):
        if self.kind == RAW:
            return f"E({self.monomial_text})"
        return f"{self.kind}{self.degree}({self.monomial_text})"

    def combine(self, raw):
        """Evaluate the goal from the list of raw moments of ``raw_monomials``."""
        if self.kind == RAW:
            return raw[0]
        if self.kind == CENTRAL:
            return central_from_raw(raw)
        return cumulant_from_raw(raw)


def format_monomial(monomial) -> str:
    if not monomial:
        return "1"
    return "*".join(v if e == 1 else f"{v}**{e}" for v, e in monomial)


_GOAL = re.compile(r"^\s*(E|[ck](\d+)|V)\s*\(\s*(.*?)\s*\)\s*$")
_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")


def parse_monomial(text: str) -> tuple:
    text = text.replace(" ", "")
    if text in ("", "1"):
        return ()
    exps = {}
    for factor in text.replace("**", "^").split("*"):
        m = _FACTOR.match(factor)
        if m is None:
            raise ValueError(f"not a monomial: {text!r}")
        exps[m.group(1)] = exps.get(m.group(1), 0) + int(m.group(2) or 1)
    return tuple(sorted((v, e) for v, e in exps.items() if e))


def parse_goal(text: str) -> MomentGoal:
    """Parse ``E(x**2)``, ``E(x*y)``, ``c2(x)``, ``k3(x)`` or ``V(x)``."""
    m = _GOAL.match(text)
    if m is None:
        raise ValueError(f"not a moment goal: {text!r}")
    head, digits, body = m.group(1), m.group(2), m.group(3)
    mono = parse_monomial(body)
    if head == "E":
        return MomentGoal(RAW, 1, mono)
    if head == "V":
        return MomentGoal(CENTRAL, 2, mono)
    return MomentGoal(head[0], int(digits), mono)


def monomial_vars(monomial) -> set:
    return {v for v, _ in monomial}
