"""Parameter sensitivities of moments.

Two routes are offered.  On solvable programs a closed form can simply be
differentiated.  Otherwise the moment recurrences themselves are
differentiated: the joint system over E(m) and its derivative D(m)
replaces D(m) by zero whenever every variable of ``m`` is independent of
the parameter, which often cuts away the non-linear part of the program.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DefectiveDependency
from .frontend.analysis import cycle_variables, param_independent_vars
from .limits import DEFAULT_LIMITS
from .moments import RAW, MomentGoal
from .recurrences import MomentEngine, RecurrenceSystem, _sort_key, goal_polynomials
from .solver import ExpPoly, closed_forms, solve_cfinite

E, D = "E", "D"


@dataclass(frozen=True)
class SensitivityGoal:
    goal: MomentGoal
    param: str

    def __str__(self):
        return f"d/d{self.param} {self.goal}"


def diff_closed_form(cf: ExpPoly, param: str) -> ExpPoly:
    """Exact derivative of a closed form with respect to ``param``."""
    return cf.diff(param)


class Dual:
    """Pairs (value, derivative) with the product rule."""

    def __init__(self, val, der):
        self.val, self.der = val, der

    def _lift(self, other):
        if isinstance(other, Dual):
            return other
        return Dual(other, 0)

    def __add__(self, other):
        other = self._lift(other)
        return Dual(self.val + other.val, self.der + other.der)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return Dual(self.val - other.val, self.der - other.der)

    def __mul__(self, other):
        other = self._lift(other)
        return Dual(self.val * other.val, self.der * other.val + self.val * other.der)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Dual(1, 0)
        for _ in range(k):
            out = out * self
        return out


def _monomial_vars(engine, m):
    return {v for v, e in zip(engine.variables, m) if e}


def sensitivity_system(engine, param, seeds, limits=DEFAULT_LIMITS) -> RecurrenceSystem:
    """Joint recurrence system over ``("E", m)`` and ``("D", m)`` labels.

    ``D`` labels of monomials over parameter-independent variables are
    dropped (they are identically zero).
    """
    f = engine.field
    indep = param_independent_vars(engine.ast, param)
    zero = (0,) * len(engine.variables)
    core = cycle_variables(engine.graph, engine.finite)

    def zeroed(m):
        return _monomial_vars(engine, m) <= indep

    todo = [lab for lab in seeds if not (lab[0] == D and zeroed(lab[1]))] + [(E, zero)]
    rows, seen = {}, set()
    while todo:
        label = todo.pop()
        if label in seen:
            continue
        seen.add(label)
        if len(seen) > limits.closure_cap:
            from .errors import ResourceLimit
            raise ResourceLimit(f"sensitivity closure exceeded {limits.closure_cap} states")
        kind, m = label
        upd = engine.update_monomial(m)
        row = {}
        # a D label touching the non-linear cycle itself grows in degree without bound
        bad = _monomial_vars(engine, m) & (engine.defective if kind == E else core)
        if bad:
            raise DefectiveDependency(
                f"sensitivity w.r.t. {param} still needs {kind}({engine.monomial_text(m)}), "
                "which lies on a non-linear cyclic dependency", variables=bad)
        if kind == E:
            for m2, c in upd.terms():
                row[(E, m2)] = c
        else:
            for m2, c in upd.terms():
                dc = f.diff(c, param)
                if dc:
                    row[(E, m2)] = row.get((E, m2), f.zero) + dc
                if not zeroed(m2):
                    row[(D, m2)] = row.get((D, m2), f.zero) + c
        rows[label] = {k: v for k, v in row.items() if v}
        todo.extend(k for k in rows[label] if k not in seen)
    state = sorted(rows, key=lambda lab: (lab[0] == D, _sort_key(lab[1])))
    index = {lab: i for i, lab in enumerate(state)}
    matrix = []
    for lab in state:
        r = [f.zero] * len(state)
        for k, c in rows[lab].items():
            r[index[k]] = c
        matrix.append(r)
    initial = []
    for kind, m in state:
        value = engine.initial_value(engine.ring({m: f.one}))
        initial.append(value if kind == E else f.diff(value, param))
    return RecurrenceSystem(engine.variables, f, state, matrix, initial)


def _poly_pair(q, solution, field, param, need_value, indep_zero):
    """(E(q), D(q)) closed forms from the solved joint system."""
    val = ExpPoly.zero(field) if need_value else None
    der = ExpPoly.zero(field)
    for m, c in q.terms():
        dc = field.diff(c, param)
        if need_value or dc:
            e = solution[(E, m)]
            if need_value:
                val = val + e * c
            if dc:
                der = der + e * dc
        if not indep_zero(m):
            der = der + solution[(D, m)] * c
    return val, der


def solve_sensitivity(ast, goal: MomentGoal, param: str, limits=DEFAULT_LIMITS,
                      engine=None) -> ExpPoly:
    """Closed form of the derivative of ``goal`` via sensitivity recurrences."""
    engine = engine or MomentEngine(ast, limits)
    f = engine.field
    indep = param_independent_vars(engine.ast, param)
    unknown = {v for v, _ in goal.monomial} - set(engine.variables)
    if unknown:
        raise ValueError(f"goal {goal} mentions unknown variables {sorted(unknown)}")

    def indep_zero(m):
        return _monomial_vars(engine, m) <= indep

    need_value = goal.kind != RAW
    polys = goal_polynomials(engine, goal)
    seeds = []
    for q in polys:
        for m, c in q.terms():
            if need_value or f.diff(c, param):
                seeds.append((E, m))
            seeds.append((D, m))
    system = sensitivity_system(engine, param, seeds, limits)
    solution = solve_cfinite(system, limits=limits)
    pairs = [_poly_pair(q, solution, f, param, need_value, indep_zero) for q in polys]
    if not need_value:
        return pairs[0][1]
    combined = goal.combine([Dual(v, d) for v, d in pairs])
    return combined.der


def sensitivity(ast, goal: MomentGoal, param: str, method="auto", limits=DEFAULT_LIMITS):
    """Derivative of ``goal`` with respect to ``param``.

    ``method`` is ``"diff"`` (differentiate the closed form),
    ``"recurrence"`` (sensitivity recurrences) or ``"auto"``, which
    differentiates when the goal is solvable and falls back otherwise.
    """
    if method == "recurrence":
        return solve_sensitivity(ast, goal, param, limits)
    if method == "diff":
        _, _, cfs = closed_forms(ast, [goal], limits)
        return diff_closed_form(cfs[goal], param)
    if method != "auto":
        raise ValueError(f"unknown sensitivity method {method!r}")
    try:
        return sensitivity(ast, goal, param, "diff", limits)
    except DefectiveDependency:
        return solve_sensitivity(ast, goal, param, limits)


__all__ = ["SensitivityGoal", "diff_closed_form", "param_independent_vars", "sensitivity",
           "sensitivity_system", "solve_sensitivity"]
