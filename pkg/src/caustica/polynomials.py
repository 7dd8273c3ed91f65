"""Homogeneous polynomials in three variables with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

from .errors import NotHomogeneous


@lru_cache(maxsize=None)
def monomials(degree: int) -> tuple[tuple[int, int, int], ...]:
    """Exponent triples of total ``degree`` in lexicographically descending order."""
    out = []
    for i in range(degree, -1, -1):
        for j in range(degree - i, -1, -1):
            out.append((i, j, degree - i - j))
    return tuple(out)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    return Fraction(float(c))


class HomogeneousPolynomial:
    """Dense homogeneous form ``sum c_k M1^i M2^j M3^l`` over ``monomials(degree)``."""

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs):
        coeffs = tuple(_as_fraction(c) for c in coeffs)
        if len(coeffs) != len(monomials(degree)):
            raise ValueError(f"degree {degree} needs {len(monomials(degree))} coefficients")
        self.degree = degree
        self.coeffs = coeffs

    @classmethod
    def from_terms(cls, terms: dict, degree: int | None = None) -> "HomogeneousPolynomial":
        """Build from ``{(i, j, l): coefficient}``; raises NotHomogeneous on mixed degrees."""
        live = {k: _as_fraction(v) for k, v in terms.items() if v != 0}
        degrees = {sum(k) for k in live}
        if len(degrees) > 1:
            raise NotHomogeneous(f"mixed total degrees {sorted(degrees)}")
        if degree is None:
            degree = degrees.pop() if degrees else 0
        elif degrees and degrees.pop() != degree:
            raise NotHomogeneous("declared degree does not match the terms")
        index = {m: k for k, m in enumerate(monomials(degree))}
        coeffs = [Fraction(0)] * len(index)
        for m, c in live.items():
            coeffs[index[tuple(m)]] = c
        return cls(degree, coeffs)

    @classmethod
    def variable(cls, k: int) -> "HomogeneousPolynomial":
        e = [0, 0, 0]
        e[k] = 1
        return cls.from_terms({tuple(e): 1}, 1)

    @classmethod
    def constant(cls, c) -> "HomogeneousPolynomial":
        return cls(0, [c])

    @classmethod
    def quadratic_form(cls, matrix) -> "HomogeneousPolynomial":
        """``<S M, M>`` for a symmetric 3x3 matrix."""
        m = np.asarray(matrix)
        terms = {}
        for a in range(3):
            for b in range(3):
                e = [0, 0, 0]
                e[a] += 1
                e[b] += 1
                terms[tuple(e)] = terms.get(tuple(e), Fraction(0)) + _as_fraction(m[a, b])
        return cls.from_terms(terms, 2)

    def terms(self) -> dict:
        return {m: c for m, c in zip(monomials(self.degree), self.coeffs) if c != 0}

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            other = HomogeneousPolynomial.constant(other) if other != 0 else None
            if other is None:
                return self
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.degree != self.degree:
            raise NotHomogeneous("cannot add forms of different degree")
        return HomogeneousPolynomial(self.degree, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return HomogeneousPolynomial(self.degree, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            c = _as_fraction(other)
            return HomogeneousPolynomial(self.degree, [c * a for a in self.coeffs])
        terms: dict = {}
        for ma, ca in self.terms().items():
            for mb, cb in other.terms().items():
                m = (ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2])
                terms[m] = terms.get(m, Fraction(0)) + ca * cb
        return HomogeneousPolynomial.from_terms(terms, self.degree + other.degree)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = HomogeneousPolynomial.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.degree, self.coeffs))

    def __repr__(self):
        return f"HomogeneousPolynomial({self.degree}, {self.to_string()!r})"

    def __call__(self, m):
        """Floating-point evaluation (real or complex)."""
        m = np.asarray(m)
        exps = np.array(monomials(self.degree))
        powers = np.prod(m[None, :] ** exps, axis=1)
        return np.dot(np.array([float(c) for c in self.coeffs]), powers)

    def evaluate_exact(self, m) -> Fraction:
        """Exact evaluation at a real point whose floats are read as exact rationals."""
        x = [_as_fraction(v) for v in m]
        total = Fraction(0)
        for (i, j, l), c in self.terms().items():
            total += c * x[0] ** i * x[1] ** j * x[2] ** l
        return total

    def to_string(self, names=("M1", "M2", "M3")) -> str:
        parts = []
        for (i, j, l), c in self.terms().items():
            factors = [f"{n}^{e}" if e > 1 else n for n, e in zip(names, (i, j, l)) if e]
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"
