"""Coefficient tower: rationals, rational functions in symbolic parameters,
and single quadratic-surd extensions on top of either.

Field elements are sympy domain elements (``gmpy2.mpq`` for ``QQ``,
``FracElement`` for ``QQ(params)``).  :class:`Surd` adjoins one square
root and interoperates with both through Python's reflected operators.
"""

from fractions import Fraction
from functools import lru_cache
from math import isqrt

import sympy
from sympy import QQ

from ..errors import UnboundParameter, UnsupportedEigenvalue


class CoeffField:
    """The field Q(p1, ..., pk) of rational functions in the given parameters."""

    def __init__(self, params=()):
        self.params = tuple(params)
        self.symbols = tuple(sympy.Symbol(p) for p in self.params)
        self.domain = QQ.frac_field(*self.symbols) if self.params else QQ
        self.zero = self.domain.zero
        self.one = self.domain.one

    def __repr__(self):
        return f"CoeffField({', '.join(self.params) or 'QQ'})"

    def __call__(self, value):
        if isinstance(value, Fraction):
            return self.domain.convert(QQ(value.numerator, value.denominator))
        if isinstance(value, str):
            return self.param(value)
        if isinstance(value, sympy.Basic):
            return self.from_sympy(value)
        return self.domain.convert(value)

    def param(self, name):
        if name not in self.params:
            raise KeyError(f"{name!r} is not a parameter of {self!r}")
        return self.domain.convert(sympy.Symbol(name))

    def is_constant(self, c):
        if isinstance(c, Surd):
            return self.is_constant(c.a) and self.is_constant(c.b)
        if not self.params:
            return True
        c = self.domain.convert(c)
        return c.numer.is_ground and c.denom.is_ground

    def to_fraction(self, c):
        """Exact rational value of a parameter-free element."""
        if not self.is_constant(c):
            raise ValueError(f"coefficient {c} depends on parameters")
        c = self.domain.convert(c)
        if self.params:
            c = QQ.convert(c.numer.LC) / QQ.convert(c.denom.LC)
        return Fraction(int(c.numerator), int(c.denominator))

    def free_params(self, c):
        if isinstance(c, Surd):
            return self.free_params(c.a) | self.free_params(c.b)
        if not self.params:
            return set()
        c = self.domain.convert(c)
        used = set()
        for poly in (c.numer, c.denom):
            for monom in poly.monoms():
                used.update(self.params[i] for i, e in enumerate(monom) if e)
        return used

    def evaluate(self, c, bindings):
        """Substitute rational values for every parameter occurring in ``c``."""
        if isinstance(c, Surd):
            return Surd.make(self.evaluate(c.a, bindings), self.evaluate(c.b, bindings), c.d)
        missing = self.free_params(c) - set(bindings)
        if missing:
            raise UnboundParameter(f"no value bound for parameter(s) {', '.join(sorted(missing))}")
        if not self.params:
            return self.to_fraction(c)
        c = self.domain.convert(c)
        values = []
        for p in self.params:
            v = Fraction(bindings.get(p, 0))
            values.append(QQ(v.numerator, v.denominator))
        num = c.numer.evaluate(list(zip(c.numer.ring.gens, values)))
        den = c.denom.evaluate(list(zip(c.denom.ring.gens, values)))
        value = QQ.convert(num) / QQ.convert(den)
        return Fraction(int(value.numerator), int(value.denominator))

    def diff(self, c, name):
        if isinstance(c, Surd):
            return Surd.make(self.diff(c.a, name), self.diff(c.b, name), c.d)
        if name not in self.params:
            return self.zero
        c = self.domain.convert(c)
        return c.diff(c.field.gens[self.params.index(name)])

    def to_sympy(self, c):
        if isinstance(c, Surd):
            return self.to_sympy(c.a) + self.to_sympy(c.b) * sympy.sqrt(c.d)
        return self.domain.to_sympy(self.domain.convert(c))

    def from_sympy(self, expr):
        return self.domain.from_sympy(sympy.nsimplify(expr) if expr.has(sympy.Float) else expr)

    def sort_key(self, c):
        """Deterministic total order used for canonical output."""
        if isinstance(c, Surd):
            return (2, c.d, self.sort_key(c.a), self.sort_key(c.b))
        if self.is_constant(c):
            return (0, self.to_fraction(c), "")
        return (1, Fraction(0), str(self.to_sympy(c)))


@lru_cache(maxsize=None)
def coeff_field(params=()):
    return CoeffField(tuple(params))


def squarefree_split(value):
    """Write a nonzero rational as r**2 * d with d a squarefree integer."""
    value = Fraction(value)
    sign = -1 if value < 0 else 1
    n = abs(value.numerator) * value.denominator
    r_num, d = 1, 1
    for prime, exp in sympy.factorint(n).items():
        r_num *= prime ** (exp // 2)
        if exp % 2:
            d *= prime
    return Fraction(r_num, value.denominator), sign * d


def rational_sqrt(value):
    """Exact square root of a nonnegative rational, or None."""
    value = Fraction(value)
    if value < 0:
        return None
    p, q = isqrt(value.numerator), isqrt(value.denominator)
    if p * p == value.numerator and q * q == value.denominator:
        return Fraction(p, q)
    return None


class Surd:
    """The number a + b*sqrt(d) with a, b field elements and d squarefree.

    Arithmetic with a different ``d`` would need a composite number field
    and is rejected.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d):
        self.a, self.b, self.d = a, b, int(d)

    @staticmethod
    def make(a, b, d):
        if not b:
            return a
        return Surd(a, b, d)

    def _split(self, other):
        if isinstance(other, Surd):
            if other.d != self.d:
                raise UnsupportedEigenvalue(
                    f"arithmetic mixing sqrt({self.d}) and sqrt({other.d}) is not supported")
            return other.a, other.b
        return other, 0

    def __add__(self, other):
        a, b = self._split(other)
        return Surd.make(self.a + a, self.b + b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        a, b = self._split(other)
        return Surd.make(self.a - a, self.b - b, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._split(other)
        return Surd.make(self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def conjugate(self):
        return Surd(self.a, -self.b, self.d)

    def norm(self):
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self):
        n = self.norm()
        return Surd.make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return self * other.inverse()
        return Surd.make(self.a / other, self.b / other, self.d)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = 1, self
        while k:
            if k & 1:
                result = base * result
            base = base * base
            k >>= 1
        return result

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, Surd):
            return (self.d, self.a, self.b) == (other.d, other.a, other.b)
        return not self.b and self.a == other

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __repr__(self):
        return f"Surd({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return f"({self.a} + {self.b}*sqrt({self.d}))"
