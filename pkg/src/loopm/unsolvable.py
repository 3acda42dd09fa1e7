"""Loops with non-linear cyclic dependencies.

Individual defective variables have no exponential-polynomial moments,
but polynomial combinations of them may still satisfy a linear
recurrence.  Candidates are left eigenvectors of the expected-update
matrix on defective monomials that also annihilate every monomial the
update leaks outside that space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import sympy

from .algebra.linsolve import nullspace
from .algebra.poly import format_poly, poly_to_sympy
from .errors import NotUnsolvable
from .frontend.analysis import find_defective
from .frontend.parser import parse
from .frontend.printer import format_expr
from .limits import DEFAULT_LIMITS
from .moments import MomentGoal
from .recurrences import MomentEngine

__all__ = ["CombinationCandidate", "find_defective", "synthesize_combinations",
           "synth_solvable_loop", "synth_solvable_loop_text", "candidate_closed_form"]


@dataclass
class CombinationCandidate:
    """``E(S_{n+1}) = lam * E(S_n) + E(inhomogeneous_n)``.

    ``S`` and ``inhomogeneous`` are polynomials in the moment engine's ring;
    the latter only involves non-defective variables.
    """

    S: object
    lam: object
    inhomogeneous: object
    degree: int
    field: object

    @property
    def lam_text(self):
        return sympy.sstr(self.field.to_sympy(self.lam))

    def update_text(self):
        """Right-hand side ``lam*s + inhomogeneous`` in the program syntax."""
        lam = self.field.to_sympy(self.lam) * sympy.Symbol("s")
        return sympy.sstr(lam + poly_to_sympy(self.inhomogeneous))

    def __str__(self):
        return f"E({format_poly(self.S)}) satisfies s' = {self.update_text()}"

    def to_json(self):
        return {"combination": format_poly(self.S), "eigenvalue": self.lam_text,
                "inhomogeneous": format_poly(self.inhomogeneous)}


def _defective_monomials(engine, defective, degree):
    idx = [engine.variables.index(v) for v in sorted(defective, key=engine.variables.index)]
    out = []
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(idx, d):
            e = [0] * len(engine.variables)
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def _eigenvalues(matrix, field, notices):
    """Eigenvalues in the coefficient field (linear characteristic factors)."""
    lam = sympy.Symbol("lam")
    M = sympy.Matrix([[field.to_sympy(a) for a in row] for row in matrix])
    char = sympy.together(M.charpoly(lam).as_expr())
    num, _ = sympy.fraction(char)
    _, factors = sympy.factor_list(sympy.expand(num), lam)
    out = []
    for fac, _ in factors:
        p = sympy.Poly(fac, lam)
        if p.degree() == 1:
            a, b = p.all_coeffs()
            out.append(field(sympy.cancel(-b / a)))
        elif p.degree() > 1:
            notices.append(f"skipped eigenvalues of the irreducible factor {sympy.sstr(fac)}")
    return sorted(set(out), key=field.sort_key)


def synthesize_combinations(ast, degree: int = 1, limits=DEFAULT_LIMITS, notices=None):
    """Combinations of defective variables up to ``degree`` obeying linear recurrences.

    Returns candidates sorted by (degree, eigenvalue); informational messages
    about skipped eigenvalues are appended to ``notices`` when given.
    """
    if degree < 1:
        raise ValueError("degree bound must be at least 1")
    notices = [] if notices is None else notices
    engine = MomentEngine(ast, limits)
    defective = engine.defective
    if not defective:
        raise NotUnsolvable("the loop has no defective variables", restriction="R3")
    f = engine.field
    basis = _defective_monomials(engine, defective, degree)
    pos = {m: i for i, m in enumerate(basis)}
    dvars = {engine.variables.index(v) for v in defective}

    updates = [engine.update_monomial(m) for m in basis]
    U = [[f.zero] * len(basis) for _ in basis]
    bad_cols = {}
    inh = []
    for a, upd in enumerate(updates):
        rest = engine.ring.zero
        for m2, c in upd.terms():
            if m2 in pos:
                U[a][pos[m2]] = c
            elif any(m2[i] for i in dvars):
                bad_cols.setdefault(m2, [f.zero] * len(basis))[a] = c
            else:
                rest += engine.ring({m2: c})
        inh.append(rest)
    bad = [bad_cols[m] for m in sorted(bad_cols)]

    found = []
    for lam in _eigenvalues(U, f, notices):
        if not lam:
            # E(S') would not depend on S at all
            continue
        rows = [[U[a][b] - (lam if a == b else f.zero) for a in range(len(basis))]
                for b in range(len(basis))]
        rows += bad
        for vec in nullspace(rows, len(basis)):
            lead = next(c for c in vec if c)
            vec = [f(c) / f(lead) if c else f.zero for c in vec]
            S = engine.ring.zero
            rest = engine.ring.zero
            for c, m, r in zip(vec, basis, inh):
                if c:
                    S += engine.ring({m: c})
                    rest += r * c
            deg = max(sum(m) for m, c in zip(basis, vec) if c)
            found.append(CombinationCandidate(S, lam, rest, deg, f))
    unique = []
    for cand in found:
        if all(cand.S != other.S for other in unique):
            unique.append(cand)
    unique.sort(key=lambda c: (c.degree, f.sort_key(c.lam), format_poly(c.S)))
    return unique


def _fresh(name, taken):
    if name not in taken:
        taken.add(name)
        return name
    for i in itertools.count(1):
        cand = f"{name}{i}"
        if cand not in taken:
            taken.add(cand)
            return cand


def synth_solvable_loop_text(ast, cand: CombinationCandidate, limits=DEFAULT_LIMITS) -> str:
    """Program text of a deterministic solvable loop tracking ``E(S)`` in ``s``."""
    engine = MomentEngine(ast, limits)
    names = engine.variables
    gens = {str(g): g for g in engine.ring.gens}

    def used(q):
        return {names[i] for m in q.monoms() for i, e in enumerate(m) if e}

    keep = set(used(cand.inhomogeneous))
    todo = list(keep)
    updates = {}
    while todo:
        v = todo.pop()
        updates[v] = engine.update(gens[v])
        for w in used(updates[v]) - keep:
            keep.add(w)
            todo.append(w)
    order = [v for v in names if v in keep]
    taken = set(names) | set(engine.params)
    s = _fresh("s", taken)
    temps = {v: _fresh("t", taken) for v in order}

    def text(q):
        return format_expr(poly_to_sympy(q))

    lines = [f"{v} = {format_expr(engine.field.to_sympy(engine.initial_value(gens[v])))}"
             for v in order]
    lines.append(f"{s} = {format_expr(engine.field.to_sympy(engine.initial_value(cand.S)))}")
    lines.append("while true:")
    for v in order:
        lines.append(f"  {temps[v]} = {text(updates[v])}")
    lam = sympy.Symbol(s) * engine.field.to_sympy(cand.lam)
    lines.append(f"  {s} = {format_expr(sympy.expand(lam + poly_to_sympy(cand.inhomogeneous)))}")
    for v in order:
        lines.append(f"  {v} = {temps[v]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def synth_solvable_loop(ast, cand: CombinationCandidate, limits=DEFAULT_LIMITS):
    """The synthesized loop as a parsed program; its variable ``s`` (or the
    first free variant of that name) follows ``E(S)``."""
    return parse(synth_solvable_loop_text(ast, cand, limits))


def candidate_closed_form(ast, cand: CombinationCandidate, limits=DEFAULT_LIMITS):
    """Closed form of E(S) obtained from the synthesized loop."""
    from .solver import closed_forms
    loop = synth_solvable_loop(ast, cand, limits)
    # s is always the last initialized variable
    var = loop.init[-1].targets[0]
    goal = MomentGoal("E", 1, ((var, 1),))
    _, _, cfs = closed_forms(loop, [goal], limits)
    return cfs[goal]
