"""Invariant ideals of closed forms.

Exponentials ``b**n`` are replaced by fresh variables, the multiplicative
relations among the bases are added as binomials, and loop counter,
exponential variables and surd symbols are eliminated with a lex
Groebner basis.  What remains generates all polynomial relations among
the goals (and parameters) that hold for every iteration.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field as dc_field

import sympy

from .algebra.coeffs import Surd, coeff_field
from .algebra.groebner import eliminate_vars, normal_form
from .algebra.hilbert import DioSystem, hilbert_basis_nat
from .algebra.poly import LEX, Ideal, format_poly, poly_ring, poly_to_sympy
from .errors import UnsupportedEigenvalue
from .limits import DEFAULT_LIMITS
from .moments import parse_goal

_N = sympy.Symbol("_n")
_T = sympy.Symbol("_T")
_U = sympy.Symbol("_u")


# -- multiplicative relations -------------------------------------------------------

def _base_field(bases, field):
    if field is not None:
        return field
    params = set()
    for b in bases:
        parts = (b.a, b.b) if isinstance(b, Surd) else (b,)
        for part in parts:
            params |= {str(s) for s in sympy.sympify(part).free_symbols}
    return coeff_field(tuple(sorted(params)))


def factor_base(value, field):
    """Split a nonzero rational (function) base into its sign and a map from
    primes / irreducible parameter polynomials to exponents."""
    expr = sympy.together(field.to_sympy(value))
    if expr == 0:
        raise ValueError("zero is not a valid exponential base")
    num, den = sympy.fraction(expr)
    sign = 1
    exps = {}
    for part, weight in ((num, 1), (den, -1)):
        content, factors = sympy.factor_list(part)
        content = sympy.Rational(content)
        if content < 0:
            sign = -sign
            content = -content
        for prime, e in sympy.factorint(content.p).items():
            exps[prime] = exps.get(prime, 0) + weight * e
        for prime, e in sympy.factorint(content.q).items():
            exps[prime] = exps.get(prime, 0) - weight * e
        for fac, e in factors:
            key = sympy.sstr(fac)
            exps[key] = exps.get(key, 0) + weight * e
    return sign, {k: e for k, e in exps.items() if e}


def _key_order(k):
    return (0, k, "") if isinstance(k, int) else (1, 0, k)


def balance_matrix(bases, field=None):
    """Rows of the one-sided system ``prod b_i**v_i = 1`` (sign ignored):
    one row per prime or irreducible factor, in a fixed order."""
    field = _base_field(bases, field)
    facts = [factor_base(b, field) for b in bases]
    keys = sorted({k for _, f in facts for k in f}, key=_key_order)
    rows = [[f.get(k, 0) for _, f in facts] for k in keys]
    signs = [1 if s < 0 else 0 for s, _ in facts]
    return rows, signs


def rational_relations(bases, field=None, limits=DEFAULT_LIMITS):
    """Exponent pairs (u, w) with prod b**u == prod b**w generating all such
    relations, for rational (or parameter-rational) bases."""
    m = len(bases)
    if not m:
        return []
    rows, signs = balance_matrix(bases, field)
    doubled = [list(r) + [-x for x in r] + [0, 0] for r in rows]
    doubled.append(list(signs) + [-x for x in signs] + [-2, 2])
    system = DioSystem.from_rows(doubled, 2 * m + 2)
    out = set()
    for v in hilbert_basis_nat(system, limits=limits):
        u, w = tuple(v[:m]), tuple(v[m:2 * m])
        if u == w:
            continue
        out.add(max((u, w), (w, u)))
    return sorted(out, key=lambda uw: (sum(uw[0]) + sum(uw[1]), uw))


def _is_rational(b):
    return not isinstance(b, Surd)


def surd_relations(bases, field, bound):
    """Bounded search for relations with all exponents at most ``bound``."""
    m = len(bases)
    by_value = {}
    for v in itertools.product(range(bound + 1), repeat=m):
        if not any(v):
            continue
        value = field.one
        try:
            for b, e in zip(bases, v):
                if e:
                    value = value * b ** e
        except UnsupportedEigenvalue:
            continue
        by_value.setdefault(value, []).append(v)
    if field.one in by_value:
        by_value[field.one].append((0,) * m)
    out = []
    for vecs in by_value.values():
        for u, w in itertools.combinations(vecs, 2):
            if any(a and b for a, b in zip(u, w)):
                continue
            out.append(max((u, w), (w, u)))
    return out


def _prune(relations):
    relations = sorted(set(relations), key=lambda uw: (sum(uw[0]) + sum(uw[1]), uw))
    kept = []
    for u, w in relations:
        dominated = False
        for u2, w2 in kept:
            for a, b in ((u2, w2), (w2, u2)):
                if all(x <= y for x, y in zip(a, u)) and all(x <= y for x, y in zip(b, w)):
                    dominated = True
        if not dominated:
            kept.append((u, w))
    return kept


def relation_vectors(bases, field=None, limits=DEFAULT_LIMITS):
    """Exponent pairs for the multiplicative relations among ``bases``.

    Returns ``(pairs, complete)``; ``complete`` is False when surd bases
    forced the bounded search.
    """
    field = _base_field(bases, field)
    rational = [i for i, b in enumerate(bases) if _is_rational(b)]
    sub = rational_relations([bases[i] for i in rational], field, limits)
    pairs = []
    for u, w in sub:
        full_u, full_w = [0] * len(bases), [0] * len(bases)
        for i, a, b in zip(rational, u, w):
            full_u[i], full_w[i] = a, b
        pairs.append((tuple(full_u), tuple(full_w)))
    complete = len(rational) == len(bases)
    if not complete:
        pairs += surd_relations(bases, field, limits.surd_exponent_bound)
    return _prune(pairs), complete


def _binomial(u, w, gens):
    left = sympy.Mul(*[g ** e for g, e in zip(gens, u)])
    right = sympy.Mul(*[g ** e for g, e in zip(gens, w)])
    return left - right


def mult_relations(bases, names=None, field=None, limits=DEFAULT_LIMITS):
    """Binomials generating the relations among exponentials of ``bases``.

    >>> from fractions import Fraction
    >>> [format_poly(r) for r in mult_relations([2, 4])]
    ['a**2 - b']
    """
    field = _base_field(bases, field)
    bases = [field(b) if not isinstance(b, Surd) else b for b in bases]
    if names is None:
        names = [chr(ord("a") + i) for i in range(len(bases))]
    ring = poly_ring(tuple(names), sympy.QQ, LEX)
    gens = [sympy.Symbol(v) for v in names]
    pairs, _ = relation_vectors(bases, field, limits)
    return [ring.from_expr(_binomial(u, w, gens)) for u, w in pairs]


# -- invariant ideals ---------------------------------------------------------------

@dataclass
class InvariantBasis:
    """Generators of the invariant ideal over goal symbols and parameters.

    ``generators`` form a reduced lex Groebner basis in the ring whose
    variables are the goals (first goal highest) followed by the
    parameters.  ``complete`` is False when relations among surd bases
    came from the bounded search, in which case the ideal may be too small.
    """

    goals: tuple
    params: tuple
    generators: list = dc_field(default_factory=list)
    complete: bool = True

    @property
    def variables(self):
        return tuple(self.goals) + tuple(self.params)

    @property
    def ring(self):
        return poly_ring(self.variables, sympy.QQ, LEX)

    def lines(self):
        return [f"{format_poly(g)} = 0" for g in self.generators]

    def to_json(self):
        return [format_poly(g) for g in self.generators]

    def to_sympy(self):
        return [poly_to_sympy(g) for g in self.generators]

    def __str__(self):
        return "\n".join(self.lines())


def _symbol_name(d):
    return f"_s{d}" if d > 0 else f"_sm{-d}"


def _coeff_expr(c, field, surd_syms):
    if isinstance(c, Surd):
        s = surd_syms.setdefault(c.d, sympy.Symbol(_symbol_name(c.d)))
        return field.to_sympy(c.a) + field.to_sympy(c.b) * s
    return field.to_sympy(c)


def _cleared(expr):
    """Numerator and parameter denominator of ``expr``."""
    num, den = sympy.fraction(sympy.together(expr))
    return sympy.expand(num), sympy.expand(den)


def _point_gens(goal_syms, values):
    gens, dens = [], []
    for g, v in zip(goal_syms, values):
        num, den = _cleared(g - v)
        gens.append(num)
        if den.free_symbols:
            dens.append(den)
    return gens, dens


def invariant_basis(closed_forms: dict, params=(), limits=DEFAULT_LIMITS) -> InvariantBasis:
    """Invariant ideal of the goals in ``closed_forms`` (goal name -> ExpPoly).

    The iteration order of ``closed_forms`` fixes the variable precedence.
    """
    names = [str(g) for g in closed_forms]
    cfs = list(closed_forms.values())
    if not cfs:
        return InvariantBasis((), tuple(params))
    field = cfs[0].field
    params = tuple(sorted(set(params) | set(field.params)))
    goal_syms = [sympy.Symbol(n) for n in names]
    param_syms = [sympy.Symbol(p) for p in params]

    bases = sorted({b for cf in cfs for b in cf.terms if b != field.one}, key=field.sort_key)
    exp_syms = [sympy.Symbol(f"_e{i}") for i in range(len(bases))]
    exp_of = dict(zip(bases, exp_syms))
    surd_syms = {}

    gens, dens = [], []
    for g, cf in zip(goal_syms, cfs):
        value = sympy.Integer(0)
        for base, coeffs in cf.terms.items():
            poly = sum((_coeff_expr(c, field, surd_syms) * _N ** i for i, c in enumerate(coeffs)),
                       sympy.Integer(0))
            value += poly if base == field.one else poly * exp_of[base]
        num, den = _cleared(g - value)
        gens.append(num)
        if den.free_symbols:
            dens.append(den)
    for base in bases:
        _coeff_expr(base, field, surd_syms)
    pairs, complete = relation_vectors(bases, field, limits)
    gens += [_binomial(u, w, exp_syms) for u, w in pairs]
    gens += [s ** 2 - d for d, s in sorted(surd_syms.items())]

    # exceptional initial values are separate points of the orbit
    start = max((cf.start for cf in cfs), default=0)
    points = []
    for k in range(start):
        pg, pd = _point_gens(goal_syms, [_coeff_expr(cf.value(k), field, surd_syms) for cf in cfs])
        points.append((pg, pd))

    surd_list = [surd_syms[d] for d in sorted(surd_syms)]
    keep = goal_syms + param_syms
    generic = _eliminated(gens, dens, [_N] + exp_syms + surd_list, keep, limits)
    for pg, pd in points:
        point_ideal = _eliminated(pg + [s ** 2 - d for d, s in sorted(surd_syms.items())], pd,
                                  surd_list, keep, limits)
        generic = _intersect(generic, point_ideal, keep, limits)
    ring = poly_ring(tuple(str(s) for s in keep), sympy.QQ, LEX)
    return InvariantBasis(tuple(names), params, [ring.from_expr(g) for g in generic], complete)


def _eliminated(gens, dens, kill, keep, limits):
    """Elimination ideal (as sympy expressions) with denominators inverted."""
    gens = list(gens)
    kill = list(kill)
    if dens:
        gens.append(_T * sympy.Mul(*dens) - 1)
        kill = [_T] + kill
    gens = [g for g in gens if g != 0]
    if not gens:
        return []
    variables = tuple(str(s) for s in kill + list(keep))
    ring = poly_ring(variables, sympy.QQ, LEX)
    ideal = Ideal([ring.from_expr(sympy.expand(g)) for g in gens], variables, LEX)
    return [poly_to_sympy(g) for g in eliminate_vars(ideal, {str(s) for s in kill}, limits).generators]


def _intersect(first, second, keep, limits):
    if not first or not second:
        return []
    gens = [_U * f for f in first] + [(1 - _U) * g for g in second]
    return _eliminated(gens, [], [_U], keep, limits)


# -- membership --------------------------------------------------------------------

_GOAL_TOKEN = re.compile(r"(?:E|V|[ck]\d+)\([^()]*\)")


def parse_candidate(text: str, basis: InvariantBasis):
    """Parse a polynomial in goal symbols such as ``E(x*y) - E(x)*E(y)``."""
    known = set(basis.goals)
    local = {p: sympy.Symbol(p) for p in basis.params}
    placeholders = {}

    def swap(m):
        name = str(parse_goal(m.group(0)))
        if name not in known:
            raise ValueError(f"{name} is not among the goals {sorted(known)}")
        key = f"_g{len(placeholders)}"
        placeholders[key] = sympy.Symbol(name)
        return key

    body = _GOAL_TOKEN.sub(swap, text)
    if "=" in body:
        left, right = body.split("=", 1)
        body = f"({left}) - ({right})"
    local.update({k: sympy.Symbol(k) for k in placeholders})
    expr = sympy.parse_expr(body, local_dict=local)
    return sympy.expand(expr.subs(placeholders, simultaneous=True))


def membership_check(candidate, basis: InvariantBasis) -> bool:
    """True iff ``candidate`` lies in the invariant ideal."""
    if isinstance(candidate, str):
        candidate = parse_candidate(candidate, basis)
    ring = basis.ring
    poly = ring.from_expr(sympy.expand(candidate)) if not hasattr(candidate, "ring") else candidate
    if not basis.generators:
        return not poly
    return not normal_form(poly, basis.generators)


def substitute_closed_forms(poly, closed_forms: dict):
    """ExpPoly obtained by plugging the closed forms into a generator."""
    from .solver import ExpPoly
    names = [str(s) for s in poly.ring.symbols]
    cfs = {str(g): cf for g, cf in closed_forms.items()}
    field = next(iter(cfs.values())).field
    total = ExpPoly.zero(field)
    for monom, coeff in poly.terms():
        term = ExpPoly.constant(field, field(poly.ring.domain.to_sympy(coeff)))
        for name, e in zip(names, monom):
            if not e:
                continue
            if name in cfs:
                term = term * cfs[name] ** e
            else:
                term = term * field.param(name) ** e
        total = total + term
    return total


__all__ = ["InvariantBasis", "balance_matrix", "factor_base", "invariant_basis",
           "membership_check", "mult_relations", "parse_candidate", "rational_relations",
           "relation_vectors", "substitute_closed_forms", "surd_relations"]
