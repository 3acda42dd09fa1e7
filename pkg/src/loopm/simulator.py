"""Monte Carlo interpreter for loop programs.

All samples are run side by side as numpy vectors.  Randomness comes from
counter-based Philox streams keyed by (seed, random site) with the
iteration number in the counter, so sample ``j`` sees the same numbers no
matter how many samples are drawn or how the work is split.  This is the
only module that uses floating point.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy
from scipy import stats

from .errors import UnboundParameter
from .frontend.ast import TRUE, Assign, BoolConst, BoolOp, Categorical, Compare, If, Not, walk
from .moments import CENTRAL, RAW, MomentGoal, central_from_raw, cumulant_from_raw

_MASK64 = (1 << 64) - 1
INIT_ITERATION = (1 << 63)


def _stream(seed, site, iteration):
    bitgen = np.random.Philox(key=[seed & _MASK64, site], counter=[0, iteration, 0, 0])
    return np.random.Generator(bitgen)


class _Compiled:
    """Numeric callables for every expression of a program."""

    def __init__(self, ast, bindings):
        self.variables = ast.variables
        missing = set(ast.params) - set(bindings)
        if missing:
            raise UnboundParameter(f"no value bound for parameter(s) {', '.join(sorted(missing))}")
        self.subs = {sympy.Symbol(p): sympy.Rational(Fraction(v).numerator, Fraction(v).denominator)
                     for p, v in bindings.items()}
        self.symbols = [sympy.Symbol(v) for v in self.variables]
        self._cache = {}
        self.sites = {}
        for stmt in walk(ast.init + ast.body):
            if isinstance(stmt, Assign):
                for i in range(len(stmt.rhs)):
                    self.sites[(id(stmt), i)] = len(self.sites)

    def expr(self, e):
        key = sympy.sympify(e)
        if key not in self._cache:
            self._cache[key] = sympy.lambdify(self.symbols, key.subs(self.subs), "numpy")
        return self._cache[key]

    def eval(self, e, state, size):
        value = self.expr(e)(*[state[v] for v in self.variables])
        return np.broadcast_to(np.asarray(value, dtype=float), (size,))


def _compare(op, a, b):
    return {"==": np.equal, "!=": np.not_equal, "<": np.less, ">": np.greater,
            "<=": np.less_equal, ">=": np.greater_equal}[op](a, b)


def _cond(comp, cond, state, size):
    if isinstance(cond, BoolConst):
        return np.full(size, cond.value)
    if isinstance(cond, Compare):
        return _compare(cond.op, comp.eval(cond.left, state, size), comp.eval(cond.right, state, size))
    if isinstance(cond, Not):
        return ~_cond(comp, cond.arg, state, size)
    if isinstance(cond, BoolOp):
        a = _cond(comp, cond.left, state, size)
        b = _cond(comp, cond.right, state, size)
        return a & b if cond.op == "and" else a | b
    raise TypeError(f"not a condition: {cond!r}")


def _sample(dist, args, rng, size):
    if dist == "Bernoulli":
        return (rng.random(size) < args[0]).astype(float)
    if dist == "Categorical":
        cum = np.cumsum(np.stack(args), axis=0)
        u = rng.random(size)
        return (u[None, :] >= cum[:-1]).sum(axis=0).astype(float)
    if dist == "DiscreteUniform":
        return rng.integers(args[0].astype(np.int64), args[1].astype(np.int64) + 1).astype(float)
    if dist == "Uniform":
        return rng.uniform(args[0], args[1])
    if dist == "Normal":
        return rng.normal(args[0], np.sqrt(args[1]))
    if dist == "Laplace":
        return rng.laplace(args[0], args[1])
    if dist == "Exponential":
        return rng.exponential(1 / args[0])
    if dist == "Gamma":
        return rng.gamma(args[0], 1 / args[1])
    if dist == "Beta":
        return rng.beta(args[0], args[1])
    if dist == "TruncNormal":
        mu, sd = args[0], np.sqrt(args[1])
        lo, hi = (args[2] - mu) / sd, (args[3] - mu) / sd
        return stats.truncnorm.rvs(lo, hi, loc=mu, scale=sd, size=size, random_state=rng)
    raise ValueError(f"cannot sample {dist}")


def _rhs_value(comp, stmt, i, state, size, seed, iteration):
    rhs = stmt.rhs[i]
    site = comp.sites[(id(stmt), i)]
    if isinstance(rhs, Categorical):
        values = [comp.eval(v, state, size) for v, _ in rhs.options]
        if len(values) == 1:
            return values[0].copy()
        probs = [comp.eval(p, state, size) for _, p in rhs.options]
        u = _stream(seed, site, iteration).random(size)
        cum = np.cumsum(np.stack(probs), axis=0)
        choice = np.minimum((u[None, :] >= cum).sum(axis=0), len(values) - 1)
        return np.choose(choice, np.stack(values))
    args = [comp.eval(a, state, size) for a in rhs.args]
    rng = _stream(seed, site, iteration)
    return _sample(rhs.dist, args, rng, size) + comp.eval(rhs.shift, state, size)


def _run(comp, stmts, state, mask, size, seed, iteration):
    for stmt in stmts:
        if isinstance(stmt, Assign):
            new = [_rhs_value(comp, stmt, i, state, size, seed, iteration)
                   for i in range(len(stmt.rhs))]
            for t, v in zip(stmt.targets, new):
                state[t] = np.where(mask, v, state[t])
        elif isinstance(stmt, If):
            c = _cond(comp, stmt.cond, state, size)
            # both branches read the state before the if
            before = dict(state)
            then_state = dict(before)
            _run(comp, stmt.then, then_state, mask & c, size, seed, iteration)
            else_state = dict(before)
            _run(comp, stmt.orelse, else_state, mask & ~c, size, seed, iteration)
            for v in state:
                state[v] = np.where(c, then_state[v], else_state[v])
        else:
            raise TypeError(f"not a statement: {stmt!r}")


@dataclass
class Trace:
    """One sample path: ``values[i]`` maps each variable to its value after i iterations."""

    values: list
    seed: int

    def __len__(self):
        return len(self.values) - 1


class TraceSet:
    """All sample paths of a run; ``data`` has shape (iterations + 1, samples, variables)."""

    def __init__(self, variables, data, seed):
        self.variables = tuple(variables)
        self.data = data
        self.seed = seed

    @property
    def samples(self):
        return self.data.shape[1]

    @property
    def iterations(self):
        return self.data.shape[0] - 1

    def __len__(self):
        return self.samples

    def __getitem__(self, j):
        rows = [dict(zip(self.variables, map(float, self.data[i, j])))
                for i in range(self.data.shape[0])]
        return Trace(rows, self.seed)

    def column(self, var, n):
        return self.data[n, :, self.variables.index(var)]

    def monomial(self, monomial, n):
        out = np.ones(self.samples)
        for v, e in monomial:
            out = out * self.column(v, n) ** e
        return out

    def write_csv(self, target):
        """CSV with columns sample, iteration and one per variable."""
        own = isinstance(target, str)
        fh = open(target, "w", newline="") if own else target
        try:
            w = csv.writer(fh)
            w.writerow(["sample", "iteration", *self.variables])
            for j in range(self.samples):
                for i in range(self.data.shape[0]):
                    w.writerow([j, i, *(repr(float(x)) for x in self.data[i, j])])
        finally:
            if own:
                fh.close()


def run_samples(ast, n: int, samples: int, seed: int = 0, bindings=None) -> TraceSet:
    """Simulate ``samples`` independent runs for ``n`` iterations each."""
    comp = _Compiled(ast, dict(bindings or {}))
    size = samples
    state = {v: np.zeros(size) for v in comp.variables}
    everyone = np.ones(size, dtype=bool)
    _run(comp, ast.init, state, everyone, size, seed, INIT_ITERATION)
    out = np.empty((n + 1, size, len(comp.variables)))
    out[0] = np.stack([state[v] for v in comp.variables], axis=-1) if comp.variables else 0
    for i in range(n):
        mask = everyone if ast.guard == TRUE else _cond(comp, ast.guard, state, size)
        _run(comp, ast.body, state, mask, size, seed, i)
        if comp.variables:
            out[i + 1] = np.stack([state[v] for v in comp.variables], axis=-1)
    return TraceSet(comp.variables, out, seed)


def _plugin(goal, values):
    if goal.kind == RAW:
        return float(values.mean())
    raw = [float((values ** j).mean()) for j in range(1, goal.degree + 1)]
    return float(central_from_raw(raw) if goal.kind == CENTRAL else cumulant_from_raw(raw))


def estimate_moment(traces: TraceSet, goal: MomentGoal, n: int, batches: int = 20):
    """Sample estimate of ``goal`` at iteration ``n`` and its standard error.

    Expected values use the usual standard error of the mean; central
    moments and cumulants use plug-in estimates with batch-means errors.
    """
    if n > traces.iterations:
        raise ValueError(f"traces only cover {traces.iterations} iterations")
    values = traces.monomial(goal.monomial, n)
    if goal.kind == RAW:
        err = float(values.std(ddof=1) / np.sqrt(len(values))) if len(values) > 1 else 0.0
        return float(values.mean()), err
    est = _plugin(goal, values)
    parts = [p for p in np.array_split(values, batches) if len(p)]
    if len(parts) < 2:
        return est, 0.0
    per = np.array([_plugin(goal, p) for p in parts])
    return est, float(per.std(ddof=1) / np.sqrt(len(parts)))


__all__ = ["Trace", "TraceSet", "run_samples", "estimate_moment"]
