"""Closed forms of C-finite recurrence systems.

Each state component is solved on its own: its exact iterates are fed to
Berlekamp-Massey to obtain the minimal recurrence, whose characteristic
polynomial is factored over Q(params).  The sequence is split into one
component per irreducible factor power (the partial-fraction
decomposition, realized with the shift operator), and every component is
fitted in the smallest field containing the roots of its factor.
"""

from __future__ import annotations

from math import comb

import sympy

from .algebra import upoly
from .algebra.coeffs import Surd, squarefree_split
from .algebra.linsolve import solve_linear
from .errors import ParamCondition, UnsupportedEigenvalue
from .limits import DEFAULT_LIMITS
from .moments import MomentGoal

N = sympy.Symbol("n", integer=True, nonnegative=True)


class _Sentinel:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


NO_LIMIT = _Sentinel("NoLimit")
DIVERGES = _Sentinel("Diverges")


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def _poly_add(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def _poly_eval(coeffs, n):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * n + c
    return acc


class ExpPoly:
    """Exponential polynomial ``sum_b p_b(n) * b**n`` valid for ``n >= start``.

    ``terms`` maps a base (field element or :class:`Surd`) to the coefficient
    list of ``p_b`` (constant term first).  Values for ``n < start`` are kept
    in ``initial``.
    """

    def __init__(self, field, terms=None, start=0, initial=()):
        self.field = field
        clean = {}
        for base, coeffs in (terms or {}).items():
            coeffs = _trim(coeffs)
            if coeffs:
                clean[base] = coeffs
        self.terms = clean
        self.start = start
        self.initial = tuple(initial)
        if len(self.initial) != start:
            raise ValueError("need exactly one exceptional value per n < start")
        self._canonicalize()

    def _canonicalize(self):
        while self.start and self.initial[-1] == self.formula(self.start - 1):
            self.start -= 1
            self.initial = self.initial[:-1]

    # -- constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, field, value):
        return cls(field, {field.one: [value]})

    @classmethod
    def zero(cls, field):
        return cls(field)

    # -- evaluation ----------------------------------------------------------
    def formula(self, n):
        total = self.field.zero
        for base, coeffs in self.terms.items():
            total = total + _poly_eval(coeffs, n) * base ** n
        return total

    def value(self, n):
        if n < self.start:
            return self.initial[n]
        return self.formula(n)

    def bases(self):
        return sorted(self.terms, key=self.field.sort_key)

    @property
    def is_zero(self):
        return not self.terms and not any(self.initial)

    # -- arithmetic ------------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, ExpPoly):
            return other
        return ExpPoly.constant(self.field, other)

    def __add__(self, other):
        other = self._lift(other)
        terms = {b: list(c) for b, c in self.terms.items()}
        for b, c in other.terms.items():
            terms[b] = _poly_add(terms.get(b, []), c)
        start = max(self.start, other.start)
        initial = [self.value(n) + other.value(n) for n in range(start)]
        return ExpPoly(self.field, terms, start, initial)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ExpPoly):
            if not other:
                return ExpPoly.zero(self.field)
            terms = {b: [x * other for x in c] for b, c in self.terms.items()}
            return ExpPoly(self.field, terms, self.start, [v * other for v in self.initial])
        terms = {}
        for b1, c1 in self.terms.items():
            for b2, c2 in other.terms.items():
                b = b1 * b2
                terms[b] = _poly_add(terms.get(b, []), _poly_mul(c1, c2))
        start = max(self.start, other.start)
        initial = [self.value(n) * other.value(n) for n in range(start)]
        return ExpPoly(self.field, terms, start, initial)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = ExpPoly.constant(self.field, self.field.one)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            other = ExpPoly.constant(self.field, other) if other is not None else None
            if other is None:
                return False
        return (self - other).is_zero

    __hash__ = None

    def shift(self, k=1):
        """The sequence ``n -> self(n + k)``."""
        terms = {}
        for base, coeffs in self.terms.items():
            shifted = [0] * len(coeffs)
            for i, c in enumerate(coeffs):
                for j in range(i + 1):
                    shifted[j] = shifted[j] + c * comb(i, j) * k ** (i - j)
            factor = base ** k
            terms[base] = [x * factor for x in shifted]
        start = max(self.start - k, 0)
        return ExpPoly(self.field, terms, start, [self.value(n + k) for n in range(start)])

    def diff(self, param):
        """Derivative with respect to a parameter."""
        f = self.field
        terms = {}
        for base, coeffs in self.terms.items():
            new = [f.diff(c, param) for c in coeffs]
            dlog = f.diff(base, param)
            if dlog:
                dlog = dlog / base
                new = _poly_add(new, [0] + [c * dlog for c in coeffs])
            terms[base] = new
        return ExpPoly(f, terms, self.start, [f.diff(v, param) for v in self.initial])

    def map_coeffs(self, fn):
        terms = {fn(b): [fn(c) for c in cs] for b, cs in self.terms.items()}
        return ExpPoly(self.field, terms, self.start, [fn(v) for v in self.initial])

    # -- output ---------------------------------------------------------------
    def to_sympy(self, n=N, full=False):
        """The general formula as a sympy expression in ``n``.

        With ``full=True`` exceptional initial values are included through a
        ``Piecewise``.
        """
        f = self.field
        total = sympy.Integer(0)
        for base in self.bases():
            coeffs = self.terms[base]
            poly = sympy.Add(*[f.to_sympy(c) * n ** i for i, c in enumerate(coeffs)])
            poly = sympy.factor_terms(sympy.expand(poly))
            b = f.to_sympy(base)
            total += poly if b == 1 else poly * b ** n
        if full and self.start:
            pieces = [(f.to_sympy(v), sympy.Eq(n, i)) for i, v in enumerate(self.initial)]
            return sympy.Piecewise(*pieces, (total, True))
        return total

    def render(self, n=N) -> str:
        text = sympy.sstr(self.to_sympy(n))
        if self.start:
            initial = ", ".join(sympy.sstr(self.field.to_sympy(v)) for v in self.initial)
            text += f"  (for n >= {self.start}; n < {self.start}: {initial})"
        return text

    def to_json(self):
        f = self.field
        return {
            "terms": [
                {"base": sympy.sstr(f.to_sympy(b)),
                 "coefficients": [sympy.sstr(f.to_sympy(c)) for c in self.terms[b]]}
                for b in self.bases()
            ],
            "start": self.start,
            "initial": [sympy.sstr(f.to_sympy(v)) for v in self.initial],
            "expression": sympy.sstr(self.to_sympy()),
        }

    def __repr__(self):
        return f"ExpPoly({self.render()})"


# -- evaluation and limits --------------------------------------------------------

def evaluate_at(cf: ExpPoly, n: int, bindings=None):
    """Exact value at iteration ``n`` with parameters bound to rationals.

    Returns a ``Fraction`` or, for quadratic-surd bases, a :class:`Surd`
    with ``Fraction`` components.
    """
    bindings = bindings or {}
    f = cf.field
    if n < cf.start:
        return f.evaluate(cf.initial[n], bindings)
    total = 0
    for base, coeffs in cf.terms.items():
        b = f.evaluate(base, bindings)
        p = _poly_eval([f.evaluate(c, bindings) for c in coeffs], n)
        total = total + p * b ** n
    if isinstance(total, int):
        from fractions import Fraction
        return Fraction(total)
    return total


def _abs_compare_one(field, base):
    """-1, 0 or 1 as |base| is below, equal to, or above 1."""
    if field.free_params(base):
        raise ParamCondition(f"convergence depends on the parameter value of base "
                             f"{field.to_sympy(base)}")
    value = field.to_sympy(base)
    magnitude = sympy.Abs(value)
    if sympy.simplify(magnitude - 1) == 0:
        return 0
    return -1 if bool(magnitude < 1) else 1


def limit_at_infinity(cf: ExpPoly):
    """Limit of the sequence as n grows: a field element, ``NO_LIMIT`` or ``DIVERGES``."""
    f = cf.field
    result = f.zero
    oscillates = False
    for base, coeffs in cf.terms.items():
        cmp = _abs_compare_one(f, base)
        if cmp < 0:
            continue
        if cmp > 0:
            return DIVERGES
        if base == f.one:
            if len(coeffs) > 1:
                return DIVERGES
            result = coeffs[0]
        elif len(coeffs) > 1:
            return DIVERGES
        else:
            oscillates = True
    return NO_LIMIT if oscillates else result


# -- Berlekamp-Massey ------------------------------------------------------------

def berlekamp_massey(seq, field):
    """Shortest connection polynomial C (C[0] = 1) with sum C[i] a[n-i] = 0."""
    zero, one = field.zero, field.one
    C, B = [one], [one]
    L, m, b = 0, 1, one
    for n in range(len(seq)):
        d = seq[n]
        for i in range(1, L + 1):
            if i < len(C) and C[i]:
                d = d + C[i] * seq[n - i]
        if not d:
            m += 1
            continue
        coef = d / b
        T = list(C)
        need = len(B) + m
        if len(C) < need:
            C = C + [zero] * (need - len(C))
        for i, x in enumerate(B):
            C[i + m] = C[i + m] - coef * x
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, d, 1
        else:
            m += 1
    C = C + [zero] * max(0, L + 1 - len(C))
    return C[:L + 1], L


# -- factor handling ------------------------------------------------------------

_T = sympy.Symbol("_t")


def _factor(poly, field):
    """Irreducible factors of a univariate polynomial over K as (coeffs, multiplicity)."""
    expr = sympy.Add(*[field.to_sympy(c) * _T ** i for i, c in enumerate(poly)])
    numer, _ = sympy.fraction(sympy.together(expr))
    _, factors = sympy.factor_list(sympy.expand(numer), _T)
    out = []
    for fac, mult in factors:
        p = sympy.Poly(fac, _T)
        if p.degree() < 1:
            continue
        coeffs = [field(c) for c in reversed(p.all_coeffs())]
        out.append((upoly.monic(coeffs), mult))
    out.sort(key=lambda fm: (len(fm[0]), [field.sort_key(c) for c in fm[0]]))
    return out


def _roots(factor, field):
    """Roots of a monic irreducible factor of degree 1 or 2."""
    if len(factor) == 2:
        return [-factor[0]]
    if len(factor) == 3:
        c, b = factor[0], factor[1]
        disc = b * b - 4 * c
        if field.free_params(disc):
            raise UnsupportedEigenvalue(
                "characteristic factor " + str(_factor_expr(factor, field))
                + " has a parameter-dependent discriminant")
        r, d = squarefree_split(field.to_fraction(disc))
        half = field(r) / 2
        a0 = -b / 2
        return [Surd(a0, half, d), Surd(a0, -half, d)]
    raise UnsupportedEigenvalue("irreducible characteristic factor of degree "
                                f"{len(factor) - 1}: {_factor_expr(factor, field)}")


def _factor_expr(factor, field):
    return sympy.Add(*[field.to_sympy(c) * sympy.Symbol("t") ** i for i, c in enumerate(factor)])


def _fit(seq, start, roots, multiplicity, field):
    """Coefficients of sum_r sum_i c_{r,i} n^i r^n matching seq[start:]."""
    unknowns = [(r, i) for r in roots for i in range(multiplicity)]
    rows, rhs = [], []
    for k in range(len(unknowns)):
        n = start + k
        rows.append([n ** i * r ** n for r, i in unknowns])
        rhs.append(seq[k])
    sol = solve_linear(rows, rhs).values
    terms = {}
    for (r, i), c in zip(unknowns, sol):
        terms.setdefault(r, [field.zero] * multiplicity)[i] = c
    return terms


def solve_sequence(seq, field, order_bound):
    """Closed form of a sequence known to satisfy a C-finite recurrence of
    order at most ``order_bound``; ``seq`` must hold at least
    ``2 * order_bound + 1`` terms."""
    C, L = berlekamp_massey(seq, field)
    deg_c = max((i for i, c in enumerate(C) if c), default=0)
    start = L - deg_c
    # characteristic polynomial without its zero roots, low degree first
    p0 = list(reversed(C[:deg_c + 1]))
    initial = list(seq[:start])
    if len(p0) <= 1:
        return ExpPoly(field, {}, start, initial)
    tail = seq[start:]
    factors = _factor(p0, field)
    p0 = upoly.monic(p0)
    terms = {}
    for fac, mult in factors:
        F = upoly.power(fac, mult)
        G, rem = upoly.divmod_(p0, F)
        if rem:
            raise ArithmeticError("factorization does not divide the characteristic polynomial")
        if len(G) <= 1:
            proj = [field.one]
        else:
            _, t, _ = upoly.gcdex(F, G)
            proj = upoly.rem(upoly.mul(t, G), p0)
        k = len(F) - 1
        comp = []
        for n in range(k):
            v = field.zero
            for j, h in enumerate(proj):
                if h:
                    v = v + h * tail[n + j]
            comp.append(v)
        roots = _roots(fac, field)
        for r, coeffs in _fit(comp, start, roots, mult, field).items():
            terms[r] = _poly_add(terms.get(r, []), coeffs)
    cf = ExpPoly(field, terms, start, initial)
    for n, v in enumerate(seq):
        if cf.value(n) != v:
            raise ArithmeticError(f"closed form disagrees with iterate {n}")
    return cf


def _reach(rows, i):
    seen = {i}
    todo = [i]
    while todo:
        k = todo.pop()
        for j, _ in rows[k]:
            if j not in seen:
                seen.add(j)
                todo.append(j)
    return seen


def solve_cfinite(system, labels=None, limits=DEFAULT_LIMITS) -> dict:
    """Closed forms for the requested state labels (all by default)."""
    rows = system.rows()
    wanted = list(system.state) if labels is None else list(labels)
    idx = [system.index(lab) for lab in wanted]
    bound = max((len(_reach(rows, i)) for i in idx), default=1)
    iterates = system.iterate(2 * bound + 3)
    out = {}
    for lab, i in zip(wanted, idx):
        order = len(_reach(rows, i))
        seq = [x[i] for x in iterates[:2 * order + 4]]
        out[lab] = solve_sequence(seq, system.field, order)
    return out


# -- goals --------------------------------------------------------------------

def poly_closed_form(q, solution, field):
    """Closed form of E(q) for a polynomial ``q`` over solved state monomials."""
    total = ExpPoly.zero(field)
    for monom, c in q.terms():
        total = total + solution[monom] * c
    return total


def goal_closed_form(goal: MomentGoal, engine, solution):
    from .recurrences import goal_polynomials
    raws = [poly_closed_form(q, solution, engine.field) for q in goal_polynomials(engine, goal)]
    return goal.combine(raws)


def closed_forms(ast, goals, limits=DEFAULT_LIMITS, engine=None):
    """Closed forms of each goal; returns ``(engine, system, {goal: ExpPoly})``."""
    from .recurrences import MomentEngine, extract_recurrences
    engine = engine or MomentEngine(ast, limits)
    system = extract_recurrences(ast, goals, limits, engine=engine)
    solution = solve_cfinite(system, limits=limits)
    return engine, system, {g: goal_closed_form(g, engine, solution) for g in goals}


__all__ = ["ExpPoly", "N", "NO_LIMIT", "DIVERGES", "evaluate_at", "limit_at_infinity",
           "berlekamp_massey", "solve_sequence", "solve_cfinite", "closed_forms",
           "goal_closed_form", "poly_closed_form"]
