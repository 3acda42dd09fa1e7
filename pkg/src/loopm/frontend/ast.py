"""Syntax tree of loop programs.

Arithmetic expressions are exact sympy expressions; identifiers become
``sympy.Symbol`` objects whether they denote program variables or
parameters (the distinction is made on the whole program, see
:attr:`Ast.params`).  All nodes are frozen dataclasses, so structural
equality is plain ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import sympy

# name -> (min arity, max arity); None = unbounded
DISTRIBUTIONS = {
    "Bernoulli": (1, 1),
    "Beta": (2, 2),
    "Categorical": (1, None),
    "DiscreteUniform": (2, 2),
    "Exponential": (1, 1),
    "Gamma": (2, 2),
    "Laplace": (2, 2),
    "Normal": (2, 2),
    "TruncNormal": (4, 4),
    "Uniform": (2, 2),
}

# distributions whose state dependence can be moved into an additive shift;
# value = indices of the arguments that move with the location
LOCATION_ARGS = {
    "Normal": (0,),
    "Laplace": (0,),
    "Uniform": (0, 1),
    "TruncNormal": (0, 2, 3),
}


# -- boolean expressions ------------------------------------------------------

@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Compare:
    op: str  # one of == != < > <= >=
    left: sympy.Expr
    right: sympy.Expr


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    left: object
    right: object


TRUE = BoolConst(True)


# -- right-hand sides ---------------------------------------------------------

@dataclass(frozen=True)
class Categorical:
    """Probabilistic choice: ``options`` is a tuple of (value, probability).

    After parsing every probability is explicit (the implicit remainder
    has been filled in).
    """

    options: tuple

    @property
    def is_deterministic(self):
        return len(self.options) == 1


@dataclass(frozen=True)
class Draw:
    """Sample from a distribution, plus an additive (state-dependent) shift."""

    dist: str
    args: tuple
    shift: sympy.Expr = sympy.Integer(0)


def constant(expr):
    return Categorical(((sympy.sympify(expr), sympy.Integer(1)),))


# -- statements ---------------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    """Simultaneous assignment; component i assigns ``rhs[i]`` to ``targets[i]``."""

    targets: tuple
    rhs: tuple

    def __post_init__(self):
        if len(self.targets) != len(self.rhs):
            raise ValueError("assignment arity mismatch")


@dataclass(frozen=True)
class If:
    cond: object
    then: tuple
    orelse: tuple = ()


@dataclass(frozen=True)
class Ast:
    init: tuple
    guard: object
    body: tuple
    params: frozenset = field(default_factory=frozenset)
    # the original loop guard once normalize() has folded it into the body
    loop_guard: object = None

    @property
    def nonterminating(self):
        return self.guard == TRUE

    @property
    def variables(self):
        """Program variables in order of first assignment."""
        seen = []
        for stmt in walk(self.init + self.body):
            if isinstance(stmt, Assign):
                for t in stmt.targets:
                    if t not in seen:
                        seen.append(t)
        return tuple(seen)

    def with_body(self, body):
        return replace(self, body=tuple(body))


def walk(stmts):
    """Yield statements depth-first in program order."""
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk(s.then)
            yield from walk(s.orelse)


def expr_symbols(expr):
    return {s.name for s in sympy.sympify(expr).free_symbols}


def bool_symbols(cond):
    if isinstance(cond, BoolConst):
        return set()
    if isinstance(cond, Compare):
        return expr_symbols(cond.left) | expr_symbols(cond.right)
    if isinstance(cond, Not):
        return bool_symbols(cond.arg)
    return bool_symbols(cond.left) | bool_symbols(cond.right)


def rhs_symbols(rhs):
    """Identifiers read by a right-hand side (values, probabilities, arguments)."""
    used = set()
    if isinstance(rhs, Categorical):
        for value, prob in rhs.options:
            used |= expr_symbols(value) | expr_symbols(prob)
    else:
        for a in rhs.args:
            used |= expr_symbols(a)
        used |= expr_symbols(rhs.shift)
    return used
