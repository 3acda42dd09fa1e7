"""Exact algebra kernel: coefficient fields, polynomials, Groebner bases,
Hilbert bases of Diophantine systems and linear solving."""

from .coeffs import CoeffField, Surd, coeff_field
from .groebner import eliminate_vars, groebner_basis, is_groebner, is_member, normal_form, reduce_basis
from .hilbert import DioSystem, hilbert_basis_nat
from .linsolve import LinearSolution, nullspace, rref, solve_linear
from .poly import DEGREVLEX, LEX, Ideal, MonomialOrder, format_poly, poly_ring

__all__ = [
    "CoeffField", "Surd", "coeff_field", "eliminate_vars", "groebner_basis", "is_groebner",
    "is_member", "normal_form", "reduce_basis", "DioSystem", "hilbert_basis_nat",
    "LinearSolution", "nullspace", "rref", "solve_linear", "DEGREVLEX", "LEX", "Ideal",
    "MonomialOrder", "format_poly", "poly_ring",
]
