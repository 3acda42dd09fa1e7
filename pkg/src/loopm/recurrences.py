"""Moment recurrences of loop programs.

The expected one-iteration update of a polynomial ``Q`` in the program
state is computed by pushing ``Q`` backwards through the loop body:

* a probabilistic choice becomes the probability-weighted sum of substitutions,
* a draw ``x = s + D`` substitutes ``x -> s + D`` and replaces ``D**k`` by
  the k-th raw moment of ``D``,
* an if-statement becomes ``[C]*T_then(Q) + (1 - [C])*T_else(Q)`` with an
  indicator polynomial ``[C]`` over the finite supports of its variables.

Closing the goal monomials under this map yields a square linear system
``E(M)_{n+1} = A E(M)_n`` with constant coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import sympy

from .algebra.coeffs import coeff_field
from .algebra.poly import convert, poly_ring
from .errors import DefectiveDependency, NotFinite, ResourceLimit
from .frontend.analysis import (analyze_supports, defective_variables, dependency_graph,
                                finite_supports, normalize)
from .frontend.ast import Assign, BoolConst, BoolOp, Categorical, Compare, Not, bool_symbols
from .limits import DEFAULT_LIMITS
from .moments import MomentGoal, format_monomial, raw_moment

ONE = "1"


def _frac(value):
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


_COMPARE = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
}


class MomentEngine:
    """Expected-update operator of a normalized program over ``K[vars]``."""

    def __init__(self, ast, limits=DEFAULT_LIMITS):
        self.ast = normalize(ast)
        self.limits = limits
        self.variables = self.ast.variables
        self.params = tuple(sorted(self.ast.params))
        self.field = coeff_field(self.params)
        self.ring = poly_ring(self.variables, self.field.domain)
        self.supports = analyze_supports(self.ast, limits)
        self.finite = finite_supports(self.supports)
        self.graph = dependency_graph(self.ast, self.finite)
        self.defective = defective_variables(self.graph, self.finite)
        self._relations = []
        for v in self.variables:
            if v in self.finite and len(self.finite[v]) > 0:
                x = self.ring.gens[self.variables.index(v)]
                rel = self.ring.one
                for s in sorted(self.finite[v]):
                    rel *= x - self.field(s)
                self._relations.append(rel)
        self._update_cache = {}
        self._moment_cache = {}
        self._draw_rings = {}

    # -- conversions -----------------------------------------------------------
    def poly(self, expr, ring=None):
        ring = ring or self.ring
        return ring.ring_new(sympy.sympify(expr))

    def monomial(self, exps):
        """Ring element for an exponent tuple or a (var, exp) monomial tuple."""
        if exps and isinstance(exps[0], tuple):
            vec = [0] * len(self.variables)
            for v, e in exps:
                if v not in self.variables:
                    raise ValueError(f"{v!r} is not a program variable")
                vec[self.variables.index(v)] += e
            exps = tuple(vec)
        if not exps:
            exps = (0,) * len(self.variables)
        return self.ring({tuple(exps): self.field.one})

    def reduce(self, q):
        """Reduce modulo the vanishing polynomials of finite supports."""
        if not self._relations or not q:
            return q
        return q.rem(self._relations)

    # -- indicator polynomials ----------------------------------------------------
    def iverson(self, cond):
        return iverson_poly(cond, self.finite, self.ring, self.variables, self.field,
                            self.ast.params)

    # -- backward transformer ----------------------------------------------------
    def _draw_ring(self, count):
        if count not in self._draw_rings:
            names = self.variables + tuple(f"__draw{i}" for i in range(count))
            self._draw_rings[count] = poly_ring(names, self.field.domain)
        return self._draw_rings[count]

    def _moment(self, draw, k):
        key = (draw.dist, draw.args, k)
        if key not in self._moment_cache:
            self._moment_cache[key] = self.field(raw_moment(draw, k))
        return self._moment_cache[key]

    def _assign(self, stmt, q):
        draws = [r for r in stmt.rhs if not isinstance(r, Categorical)]
        ring = self._draw_ring(len(draws)) if draws else self.ring
        nv = len(self.variables)
        qx = convert(q, ring) if draws else q
        choices = []
        d = 0
        for rhs in stmt.rhs:
            if isinstance(rhs, Categorical):
                choices.append([(self.field(p), self.poly(v, ring)) for v, p in rhs.options
                                if p != 0])
            else:
                choices.append([(self.field.one, self.poly(rhs.shift, ring) + ring.gens[nv + d])])
                d += 1
        targets = [ring.gens[self.variables.index(t)] for t in stmt.targets]
        total = ring.zero
        for combo in itertools.product(*choices):
            prob = self.field.one
            for p, _ in combo:
                prob *= p
            subst = list(zip(targets, (v for _, v in combo)))
            total += qx.compose(subst) * prob
        if not draws:
            return total
        out = {}
        for monom, coeff in total.terms():
            c = coeff
            for i, k in enumerate(monom[nv:]):
                if k:
                    c *= self._moment(draws[i], k)
            if c:
                key = monom[:nv]
                out[key] = out.get(key, self.field.zero) + c
        return self.ring({m: c for m, c in out.items() if c})

    def transform(self, stmts, q, reduce=True):
        """Expected value of ``q`` after ``stmts`` as a polynomial in the state before them."""
        for stmt in reversed(stmts):
            if isinstance(stmt, Assign):
                q = self._assign(stmt, q)
            else:
                ind = self.iverson(stmt.cond)
                then = self.transform(stmt.then, q, reduce)
                other = self.transform(stmt.orelse, q, reduce)
                q = ind * then + (self.ring.one - ind) * other
            if reduce:
                q = self.reduce(q)
            if len(q) > self.limits.max_terms:
                raise ResourceLimit(f"moment update has {len(q)} terms")
        return q

    def update(self, q):
        """E(q_{n+1}) as a polynomial in the state at iteration n."""
        return self.transform(self.ast.body, q)

    def update_monomial(self, monom):
        if monom not in self._update_cache:
            self._update_cache[monom] = self.update(self.ring({monom: self.field.one}))
        return self._update_cache[monom]

    def initial_value(self, q):
        """E(q) at the loop head before the first iteration."""
        q = self.transform(self.ast.init, q, reduce=False)
        zero = (0,) * len(self.variables)
        return dict(q.terms()).get(zero, self.field.zero) if q else self.field.zero

    # -- analysis helpers ---------------------------------------------------------
    def cone(self, names):
        """Variables that the given variables (transitively) read."""
        g = self.graph.to_networkx()
        out = set(names)
        for v in names:
            if v in g:
                out |= nx.descendants(g, v)
        return out

    def check_goal_cone(self, names):
        bad = self.cone(names) & self.defective
        if bad:
            raise DefectiveDependency(
                "moments depend on a non-linear cyclic dependency through "
                + ", ".join(sorted(bad)), variables=bad)

    def monomial_text(self, monom):
        return format_monomial(tuple((v, e) for v, e in zip(self.variables, monom) if e))


def iverson_poly(cond, finite, ring, variables, field, params=()):
    """Polynomial equal to 1 on satisfying valuations of the finite supports, 0 elsewhere."""
    if isinstance(cond, BoolConst):
        return ring.one if cond.value else ring.zero
    if isinstance(cond, Not):
        return ring.one - iverson_poly(cond.arg, finite, ring, variables, field, params)
    if isinstance(cond, BoolOp):
        a = iverson_poly(cond.left, finite, ring, variables, field, params)
        b = iverson_poly(cond.right, finite, ring, variables, field, params)
        out = a * b if cond.op == "and" else a + b - a * b
        return _reduce_finite(out, finite, ring, variables, field)
    if not isinstance(cond, Compare):
        raise TypeError(f"not a condition: {cond!r}")
    names = sorted(bool_symbols(cond))
    if set(names) & set(params):
        raise NotFinite(f"condition {cond.left} {cond.op} {cond.right} reads a parameter",
                        restriction="R2")
    missing = [v for v in names if v not in finite]
    if missing:
        raise NotFinite("condition variable(s) " + ", ".join(missing)
                        + " do not have finite support")
    left, right = sympy.sympify(cond.left), sympy.sympify(cond.right)
    syms = [sympy.Symbol(v) for v in names]
    total = ring.zero
    for point in itertools.product(*(sorted(finite[v]) for v in names)):
        env = {s: sympy.Rational(x.numerator, x.denominator) for s, x in zip(syms, point)}
        if not _COMPARE[cond.op](left.subs(env), right.subs(env)):
            continue
        term = ring.one
        for v, x in zip(names, point):
            term *= _lagrange(ring.gens[variables.index(v)], x, finite[v], field)
        total += term
    return total


def _lagrange(gen, point, support, field):
    out = gen.ring.one
    for s in sorted(support):
        if s != point:
            out *= (gen - field(s)) * field(1 / (point - s))
    return out


def _reduce_finite(q, finite, ring, variables, field):
    rels = []
    for v in variables:
        if v in finite:
            x = ring.gens[variables.index(v)]
            rel = ring.one
            for s in sorted(finite[v]):
                rel *= x - field(s)
            rels.append(rel)
    return q.rem(rels) if rels and q else q


# -- recurrence systems ------------------------------------------------------------

@dataclass
class RecurrenceSystem:
    """``x_{n+1} = A x_n`` over labelled states with initial vector ``x_0``.

    Labels are exponent tuples over ``variables`` for moment systems; the
    sensitivity module uses ``("E", m)`` / ``("D", m)`` pairs.
    """

    variables: tuple
    field: object
    state: list
    matrix: list
    initial: list
    names: dict = field(default_factory=dict)

    def index(self, label):
        return self.state.index(label)

    @property
    def size(self):
        return len(self.state)

    def rows(self):
        """Sparse rows: list of [(column, coefficient)]."""
        return [[(j, a) for j, a in enumerate(row) if a] for row in self.matrix]

    def iterate(self, steps):
        """Exact iterates ``[x_0, ..., x_steps]``."""
        rows = self.rows()
        x = list(self.initial)
        out = [x]
        for _ in range(steps):
            x = [sum((a * x[j] for j, a in row), self.field.zero) for row in rows]
            out.append(x)
        return out

    def label_text(self, label):
        if label in self.names:
            return self.names[label]
        if isinstance(label, tuple) and label and isinstance(label[0], str):
            kind, m = label
            inner = self.label_text(m)
            return inner if kind == "E" else f"d{inner}"
        mono = format_monomial(tuple((v, e) for v, e in zip(self.variables, label) if e))
        return f"E({mono})"

    def dump(self) -> str:
        """Human-readable listing of the system."""
        lines = []
        for i, label in enumerate(self.state):
            terms = []
            for j, a in enumerate(self.matrix[i]):
                if a:
                    c = self.field.to_sympy(a)
                    name = self.label_text(self.state[j])
                    terms.append(f"{name}" if c == 1 else f"({c})*{name}")
            rhs = " + ".join(terms) if terms else "0"
            init = self.field.to_sympy(self.initial[i])
            lines.append(f"{self.label_text(label)}[n+1] = {rhs}    ; {self.label_text(label)}[0] = {init}")
        return "\n".join(lines)


def _sort_key(monom):
    return (sum(monom), tuple(-e for e in monom))


def goal_polynomials(engine, goal: MomentGoal):
    """Reduced polynomials whose expectations are the goal's raw moments."""
    return [engine.reduce(engine.monomial(m)) for m in goal.raw_monomials]


def close_system(engine, seeds, limits=DEFAULT_LIMITS):
    """Close the monomials of ``seeds`` under the expected update."""
    zero = (0,) * len(engine.variables)
    todo = [zero]
    for q in seeds:
        todo.extend(q.monoms())
    seen = set()
    order = []
    rows = {}
    while todo:
        m = todo.pop()
        if m in seen:
            continue
        seen.add(m)
        order.append(m)
        if len(order) > limits.closure_cap:
            raise ResourceLimit(f"moment closure exceeded {limits.closure_cap} monomials")
        rows[m] = engine.update_monomial(m)
        for m2 in rows[m].monoms():
            if m2 not in seen:
                todo.append(m2)
    state = sorted(order, key=_sort_key)
    index = {m: i for i, m in enumerate(state)}
    matrix = []
    for m in state:
        row = [engine.field.zero] * len(state)
        for m2, c in rows[m].terms():
            row[index[m2]] = c
        matrix.append(row)
    initial = [engine.initial_value(engine.ring({m: engine.field.one})) for m in state]
    return RecurrenceSystem(engine.variables, engine.field, state, matrix, initial)


def extract_recurrences(ast, goals, limits=DEFAULT_LIMITS, engine=None):
    """Moment recurrence system covering the raw moments behind ``goals``."""
    engine = engine or MomentEngine(ast, limits)
    names = set()
    seeds = []
    for g in goals:
        for v, _ in g.monomial:
            if v not in engine.variables:
                raise ValueError(f"goal {g} mentions {v!r}, which is not a program variable")
            names.add(v)
        seeds.extend(goal_polynomials(engine, g))
    engine.check_goal_cone(names)
    return close_system(engine, seeds, limits)
