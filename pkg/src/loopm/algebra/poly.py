"""Sparse multivariate polynomials over a coefficient field.

Polynomials are sympy ``PolyElement`` objects living in a ``PolyRing``
whose generator order is the variable precedence and whose monomial
order is lex or degrevlex.  This module adds the monomial-order type,
ideal container and the canonical text format used everywhere in
reports and golden tests.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import sympy
from sympy import QQ
from sympy.polys.orderings import grevlex, lex
from sympy.polys.rings import PolyRing

LEX = "lex"
DEGREVLEX = "degrevlex"
_ORDERS = {LEX: lex, DEGREVLEX: grevlex}


@dataclass(frozen=True)
class MonomialOrder:
    kind: str
    variables: tuple

    def __post_init__(self):
        if self.kind not in _ORDERS:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "variables", tuple(self.variables))

    def ring(self, domain=QQ):
        return poly_ring(self.variables, domain, self.kind)


@lru_cache(maxsize=None)
def poly_ring(variables, domain=QQ, order=LEX):
    return PolyRing([sympy.Symbol(v) for v in variables], domain, _ORDERS[order])


def ring_names(ring):
    return tuple(str(s) for s in ring.symbols)


def order_of(ring):
    return DEGREVLEX if ring.order == grevlex else LEX


def convert(f, ring):
    """Move ``f`` into ``ring`` (generators matched by name)."""
    if f.ring == ring:
        return f
    names = ring_names(ring)
    position = {v: i for i, v in enumerate(names)}
    src = ring_names(f.ring)
    terms = {}
    for monom, coeff in f.terms():
        target = [0] * len(names)
        for v, e in zip(src, monom):
            if e:
                if v not in position:
                    raise ValueError(f"variable {v} does not exist in target ring")
                target[position[v]] = e
        terms[tuple(target)] = ring.domain.convert(coeff, f.ring.domain)
    return ring.from_dict(terms)


def variables_of(f):
    names = ring_names(f.ring)
    used = set()
    for monom in f.monoms():
        used.update(names[i] for i, e in enumerate(monom) if e)
    return used


@dataclass
class Ideal:
    generators: list
    variables: tuple
    order: str = LEX
    domain: object = field(default=QQ)

    def __post_init__(self):
        ring = poly_ring(tuple(self.variables), self.domain, self.order)
        self.generators = [convert(g, ring) for g in self.generators if g]

    @property
    def ring(self):
        return poly_ring(tuple(self.variables), self.domain, self.order)


def _format_coeff(coeff, domain):
    if domain == QQ or getattr(domain, "is_QQ", False) or getattr(domain, "is_ZZ", False):
        value = Fraction(int(coeff.numerator), int(coeff.denominator))
        return value, None
    expr = domain.to_sympy(coeff)
    if expr.is_Rational:
        return Fraction(int(expr.p), int(expr.q)), None
    return None, expr


def format_monomial(monom, names):
    parts = []
    for name, e in zip(names, monom):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}**{e}")
    return "*".join(parts)


def format_poly(f):
    """Canonical text: terms in descending ring order, sympy-like syntax.

    >>> R = poly_ring(("x", "y"))
    >>> x, y = R.gens
    >>> format_poly(x**3 + 5*x**2 - y**2 + 4)
    'x**3 + 5*x**2 - y**2 + 4'
    """
    if not f:
        return "0"
    names = ring_names(f.ring)
    pieces = []
    for monom, coeff in f.terms():
        mono = format_monomial(monom, names)
        value, expr = _format_coeff(coeff, f.ring.domain)
        if value is not None:
            sign = "-" if value < 0 else "+"
            mag = abs(value)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            elif mag.denominator == 1:
                body = f"{mag}*{mono}"
            else:
                body = f"({mag})*{mono}"
        else:
            sign = "+"
            text = str(expr)
            body = f"({text})*{mono}" if mono else f"({text})"
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def poly_to_sympy(f):
    names = ring_names(f.ring)
    syms = [sympy.Symbol(n) for n in names]
    total = sympy.Integer(0)
    for monom, coeff in f.terms():
        term = f.ring.domain.to_sympy(coeff)
        for s, e in zip(syms, monom):
            if e:
                term *= s**e
        total += term
    return total
