"""Minimal natural solutions of homogeneous linear Diophantine systems."""

from dataclasses import dataclass

from ..errors import ResourceLimit
from ..limits import DEFAULT_LIMITS


@dataclass(frozen=True)
class DioSystem:
    """Integer matrix ``A``; solutions are natural vectors ``v`` with ``A v = 0``."""

    matrix: tuple
    ncols: int

    @classmethod
    def from_rows(cls, rows, ncols=None):
        rows = tuple(tuple(int(a) for a in row) for row in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for an empty system")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged Diophantine system")
        return cls(rows, ncols)

    def image(self, v):
        return tuple(sum(a * x for a, x in zip(row, v)) for row in self.matrix)

    def is_solution(self, v):
        return not any(self.image(v))


def _leq(a, b):
    return all(x <= y for x, y in zip(a, b))


def hilbert_basis_nat(system, bound=None, limits=DEFAULT_LIMITS):
    """Componentwise-minimal nonzero natural solutions of ``A v = 0``.

    Contejean-Devie completion: grow candidate vectors one unit at a time,
    only along columns that move the image ``A v`` back towards zero, and
    prune every candidate that dominates an already-found solution.
    """
    bound = limits.hilbert_entry_bound if bound is None else bound
    m = system.ncols
    columns = [tuple(row[j] for row in system.matrix) for j in range(m)]
    basis = []
    frontier = set()
    for j in range(m):
        e = [0] * m
        e[j] = 1
        frontier.add(tuple(e))
    while frontier:
        found = []
        expanded = set()
        for v in sorted(frontier):
            image = system.image(v)
            if not any(image):
                found.append(v)
                continue
            for j, col in enumerate(columns):
                if sum(a * c for a, c in zip(image, col)) < 0:
                    w = list(v)
                    w[j] += 1
                    if w[j] > bound:
                        raise ResourceLimit(
                            f"Hilbert basis search exceeded entry bound {bound}")
                    expanded.add(tuple(w))
        basis.extend(found)
        frontier = {w for w in expanded if not any(_leq(b, w) for b in basis)}
    return sorted(basis)
