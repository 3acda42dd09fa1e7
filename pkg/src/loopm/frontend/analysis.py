"""Static analyses on programs: value supports, dependency graph,
restriction checking and normalization."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

import networkx as nx
import sympy

from ..errors import NormalizeError, R1Violation
from ..limits import DEFAULT_LIMITS
from .ast import (LOCATION_ARGS, TRUE, Assign, Ast, Categorical, Draw, If, bool_symbols,
                  expr_symbols, rhs_symbols, walk)


class _Unbounded:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Unbounded"

    def __reduce__(self):
        return (_Unbounded, ())


UNBOUNDED = _Unbounded()


# -- expression helpers ---------------------------------------------------------

def _symbols(names):
    return [sympy.Symbol(v) for v in names]


def poly_terms(expr, variables):
    """``expr`` as a list of (exponent tuple, sympy coefficient) over ``variables``."""
    expr = sympy.expand(sympy.sympify(expr))
    if not variables:
        return [((), expr)] if expr != 0 else []
    p = sympy.Poly(expr, *_symbols(variables))
    return list(p.terms())


def split_state(expr, variables):
    """Split ``expr`` into (part reading program variables, constant part)."""
    expr = sympy.expand(sympy.sympify(expr))
    names = set(variables)
    state = sympy.Integer(0)
    const = sympy.Integer(0)
    for term in sympy.Add.make_args(expr):
        if expr_symbols(term) & names:
            state += term
        else:
            const += term
    return state, const


# -- normalization ----------------------------------------------------------------

def _normalize_rhs(rhs, variables):
    names = set(variables)
    if isinstance(rhs, Categorical):
        for _, prob in rhs.options:
            if expr_symbols(prob) & names:
                raise R1Violation(f"probability {prob} depends on the program state")
        return rhs
    state_parts = [split_state(a, variables) for a in rhs.args]
    if not any(s != 0 for s, _ in state_parts):
        return rhs
    moving = LOCATION_ARGS.get(rhs.dist)
    if moving is None:
        raise NormalizeError(f"{rhs.dist} parameter depends on the program state and is not "
                             f"a location parameter")
    shift = state_parts[moving[0]][0]
    for i, (s, _) in enumerate(state_parts):
        expected = shift if i in moving else 0
        if sympy.expand(s - expected) != 0:
            raise NormalizeError(f"{rhs.dist} arguments depend on the program state in a way "
                                 f"that is not a common location shift")
    args = tuple(c if i in moving else a
                 for i, (a, (_, c)) in enumerate(zip(rhs.args, state_parts)))
    return Draw(rhs.dist, args, sympy.expand(rhs.shift + shift))


def _normalize_stmts(stmts, variables):
    out = []
    for s in stmts:
        if isinstance(s, Assign):
            out.append(Assign(s.targets, tuple(_normalize_rhs(r, variables) for r in s.rhs)))
        else:
            out.append(If(s.cond, _normalize_stmts(s.then, variables),
                          _normalize_stmts(s.orelse, variables)))
    return tuple(out)


def normalize(ast: Ast) -> Ast:
    """Fold the loop guard into the body and move location dependence out of draws.

    ``while G: B`` becomes ``while true: if G: B end`` (the original guard
    is kept in ``loop_guard``); ``Normal(y, 1)`` becomes ``y + Normal(0, 1)``.
    """
    variables = ast.variables
    body = ast.body
    loop_guard = ast.loop_guard
    if not ast.nonterminating:
        body = (If(ast.guard, body, ()),)
        loop_guard = ast.guard
    return replace(ast, init=_normalize_stmts(ast.init, variables),
                   body=_normalize_stmts(body, variables), guard=TRUE, loop_guard=loop_guard)


# -- supports ---------------------------------------------------------------------

def _eval_poly(terms, point):
    total = Fraction(0)
    for monom, coeff in terms:
        value = Fraction(int(coeff.p), int(coeff.q))
        for x, e in zip(point, monom):
            if e:
                value *= x ** e
        total += value
    return total


def _abstract_expr(expr, state, limits):
    expr = sympy.expand(sympy.sympify(expr))
    used = sorted(expr_symbols(expr))
    if any(v not in state for v in used):
        return UNBOUNDED  # reads a parameter
    sets = [state[v] for v in used]
    if any(s is UNBOUNDED for s in sets):
        return UNBOUNDED
    size = 1
    for s in sets:
        size *= len(s)
    if size > 16 * limits.support_values:
        return UNBOUNDED
    terms = poly_terms(expr, used)
    if any(not c.is_Rational for _, c in terms):
        return UNBOUNDED
    ordered = [sorted(s) for s in sets]
    values = {_eval_poly(terms, point) for point in itertools.product(*ordered)}
    if not values:
        values = {Fraction(0)}
    # repeated squaring keeps the set small but the numbers explode
    if any(max(v.numerator.bit_length(), v.denominator.bit_length()) > limits.support_bits
           for v in values):
        return UNBOUNDED
    return frozenset(values)


def _draw_support(rhs, state, limits):
    args = rhs.args
    if rhs.dist == "Bernoulli":
        base = frozenset({Fraction(0), Fraction(1)})
    elif rhs.dist == "Categorical":
        base = frozenset(Fraction(i) for i in range(len(args)))
    elif rhs.dist == "DiscreteUniform":
        a, b = (sympy.sympify(x) for x in args)
        if a.is_Integer and b.is_Integer and b - a < limits.support_values:
            base = frozenset(Fraction(i) for i in range(int(a), int(b) + 1))
        else:
            base = UNBOUNDED
    else:
        base = UNBOUNDED
    if base is UNBOUNDED:
        return base
    shift = _abstract_expr(rhs.shift, state, limits)
    if shift is UNBOUNDED:
        return shift
    return frozenset(s + v for s in shift for v in base)


def _abstract_rhs(rhs, state, limits):
    if isinstance(rhs, Draw):
        return _draw_support(rhs, state, limits)
    out = set()
    for value, prob in rhs.options:
        if prob == 0:
            continue
        vals = _abstract_expr(value, state, limits)
        if vals is UNBOUNDED:
            return UNBOUNDED
        out |= vals
    return frozenset(out)


def _join(a, b):
    if a is UNBOUNDED or b is UNBOUNDED:
        return UNBOUNDED
    return a | b


def _join_states(s1, s2, limits):
    out = {}
    for v in s1:
        j = _join(s1[v], s2[v])
        out[v] = UNBOUNDED if j is not UNBOUNDED and len(j) > limits.support_values else j
    return out


def _abstract_stmts(stmts, state, ever, limits):
    for s in stmts:
        if isinstance(s, Assign):
            new = [_abstract_rhs(r, state, limits) for r in s.rhs]
            state = dict(state)
            for t, vals in zip(s.targets, new):
                if vals is not UNBOUNDED and len(vals) > limits.support_values:
                    vals = UNBOUNDED
                state[t] = vals
                ever[t] = _join(ever[t], vals)
                if ever[t] is not UNBOUNDED and len(ever[t]) > limits.support_values:
                    ever[t] = UNBOUNDED
        else:
            a = _abstract_stmts(s.then, state, ever, limits)
            b = _abstract_stmts(s.orelse, state, ever, limits)
            state = _join_states(a, b, limits)
    return state


def analyze_supports(ast: Ast, limits=DEFAULT_LIMITS) -> dict:
    """Overapproximate the set of values each variable can take.

    Returns ``{var: frozenset of Fraction}`` or ``UNBOUNDED`` per variable.
    Values at every program point are included, not only at the loop head.
    Variables that are read before their first assignment start at 0.
    """
    variables = ast.variables
    zero = frozenset({Fraction(0)})
    state = {v: zero for v in variables}
    ever = {v: frozenset() for v in variables}
    state = _abstract_stmts(ast.init, state, ever, limits)
    ever = _join_states(ever, state, limits)
    for _ in range(limits.support_iterations):
        after = _abstract_stmts(ast.body, state, ever, limits)
        joined = _join_states(state, after, limits)
        if joined == state:
            break
        state = joined
    else:
        # cap reached: anything still growing becomes unbounded, then settle
        while True:
            after = _join_states(state, _abstract_stmts(ast.body, state, ever, limits), limits)
            changed = [v for v in variables if after[v] != state[v]]
            if not changed:
                break
            for v in changed:
                after[v] = UNBOUNDED
                ever[v] = UNBOUNDED
            state = after
    result = {}
    for v in variables:
        s = _join(ever[v], state[v])
        result[v] = s
    return result


def finite_supports(supports):
    return {v: s for v, s in supports.items() if s is not UNBOUNDED}


# -- dependency graph ----------------------------------------------------------

@dataclass
class DependencyGraph:
    """``edges[t][v]`` is True when ``t``'s update reads ``v`` non-linearly."""

    variables: tuple
    edges: dict = field(default_factory=dict)

    def add(self, target, source, nonlinear):
        row = self.edges.setdefault(target, {})
        row[source] = row.get(source, False) or nonlinear

    def to_networkx(self):
        g = nx.DiGraph()
        g.add_nodes_from(self.variables)
        for t, row in self.edges.items():
            for v, nonlinear in row.items():
                g.add_edge(t, v, nonlinear=nonlinear)
        return g


def _expr_edges(graph, target, expr, variables, finite):
    infinite = [v for v in variables if v not in finite]
    for monom, _ in poly_terms(expr, variables):
        deg = sum(e for v, e in zip(variables, monom) if v in infinite)
        for v, e in zip(variables, monom):
            if e:
                graph.add(target, v, deg >= 2)


def _stmt_edges(graph, stmts, variables, finite, context):
    for s in stmts:
        if isinstance(s, Assign):
            for t, rhs in zip(s.targets, s.rhs):
                graph.edges.setdefault(t, {})
                for v in context:
                    graph.add(t, v, False)
                if isinstance(rhs, Categorical):
                    for value, _ in rhs.options:
                        _expr_edges(graph, t, value, variables, finite)
                else:
                    _expr_edges(graph, t, rhs.shift, variables, finite)
                    for a in rhs.args:
                        _expr_edges(graph, t, a, variables, finite)
        else:
            inner = context | (bool_symbols(s.cond) & set(variables))
            _stmt_edges(graph, s.then, variables, finite, inner)
            _stmt_edges(graph, s.orelse, variables, finite, inner)


def dependency_graph(ast: Ast, finite=None) -> DependencyGraph:
    """Loop-body dependencies; an edge is non-linear when the monomial it
    comes from has degree >= 2 in the variables of unbounded support."""
    variables = ast.variables
    if finite is None:
        finite = finite_supports(analyze_supports(ast))
    graph = DependencyGraph(variables)
    _stmt_edges(graph, ast.body, variables, set(finite), frozenset())
    return graph


def cycle_variables(graph: DependencyGraph, finite=()) -> set:
    """Variables lying on a dependency cycle with a non-linear edge."""
    g = graph.to_networkx()
    bad = set()
    for comp in nx.strongly_connected_components(g):
        for t in comp:
            if any(nl and v in comp for v, nl in graph.edges.get(t, {}).items()):
                bad |= comp
                break
    return bad - set(finite)


def defective_variables(graph: DependencyGraph, finite=()) -> set:
    """Variables on, or depending on, a dependency cycle with a non-linear edge."""
    g = graph.to_networkx()
    bad = cycle_variables(graph)
    defective = set(bad)
    for v in graph.variables:
        if v not in defective and nx.descendants(g, v) & bad:
            defective.add(v)
    return defective - set(finite)


# -- restrictions ----------------------------------------------------------------

@dataclass
class VarClassification:
    finite: dict
    effective: set
    defective: set
    violations: list = field(default_factory=list)  # (restriction, message)

    @property
    def ok(self):
        return not self.violations


def check_restrictions(ast: Ast, limits=DEFAULT_LIMITS) -> VarClassification:
    """Verify R1 (raises), and report R2/R3 problems in the classification."""
    ast = normalize(ast)
    supports = analyze_supports(ast, limits)
    finite = finite_supports(supports)
    violations = []
    for s in walk(ast.init + ast.body):
        if isinstance(s, If):
            for v in sorted(bool_symbols(s.cond) & set(ast.variables)):
                if v not in finite:
                    violations.append(("R2", f"condition variable {v} has unbounded support"))
    graph = dependency_graph(ast, finite)
    defective = defective_variables(graph, finite)
    if defective:
        violations.append(("R3", "non-linear cyclic dependency through "
                                 + ", ".join(sorted(defective))))
    effective = set(ast.variables) - defective
    return VarClassification(finite, effective, defective, violations)


def find_defective(ast: Ast) -> set:
    return check_restrictions(ast).defective


def param_independent_vars(ast: Ast, param: str) -> set:
    """Variables whose values can never be influenced by ``param``."""
    ast = normalize(ast)
    g = nx.DiGraph()
    g.add_nodes_from(ast.variables)
    g.add_node(("param", param))

    def visit(stmts, context):
        for s in stmts:
            if isinstance(s, Assign):
                for t, rhs in zip(s.targets, s.rhs):
                    for name in rhs_symbols(rhs) | context:
                        g.add_edge(t, ("param", name) if name in ast.params else name)
            else:
                inner = context | bool_symbols(s.cond)
                visit(s.then, inner)
                visit(s.orelse, inner)

    visit(ast.init + ast.body, frozenset())
    target = ("param", param)
    return {v for v in ast.variables if not nx.has_path(g, v, target)}
