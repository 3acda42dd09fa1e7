"""Exact Gauss-Jordan elimination over any field of Python numbers.

Entries may be ``mpq``, ``FracElement``, :class:`~loopm.algebra.coeffs.Surd`
or plain ``int``/``Fraction``; 0 and 1 are used as the neutral elements.
"""

from dataclasses import dataclass, field

from sympy import QQ

from ..errors import NoSolution


def _inverse(x):
    # int / int would give a float
    return QQ(1, x) if isinstance(x, int) else 1 / x


@dataclass
class LinearSolution:
    values: list
    nullspace: list = field(default_factory=list)

    @property
    def unique(self):
        return not self.nullspace


def rref(rows):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(M)) if M[i][c]), None)
        if pivot is None:
            continue
        M[r], M[pivot] = M[pivot], M[r]
        inv = _inverse(M[r][c])
        M[r] = [x * inv if x else x for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                factor = M[i][c]
                M[i] = [x - factor * y if y else x for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def nullspace(rows, ncols=None):
    """Basis of {x : A x = 0}, one vector per free column."""
    if not rows:
        if ncols is None:
            raise ValueError("ncols needed for an empty matrix")
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    ncols = len(rows[0])
    R, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, c in zip(R, pivots):
            if row[f]:
                v[c] = -row[f]
        basis.append(v)
    return basis


def solve_linear(A, b):
    """Solve ``A x = b`` exactly.

    Returns a :class:`LinearSolution` whose ``values`` is a particular
    solution (free unknowns set to zero) and whose ``nullspace`` spans the
    homogeneous solutions.  Raises :class:`NoSolution` if inconsistent.
    """
    if len(A) != len(b):
        raise ValueError("row count of A and length of b differ")
    if not A:
        raise ValueError("empty system")
    ncols = len(A[0])
    augmented = [list(row) + [rhs] for row, rhs in zip(A, b)]
    R, pivots = rref(augmented)
    if ncols in pivots:
        raise NoSolution("linear system is inconsistent")
    values = [0] * ncols
    for row, c in zip(R, pivots):
        values[c] = row[ncols]
    return LinearSolution(values, nullspace(A))
