"""Moment vectors, rational 0-homogeneous integrals and conservation checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .billiards import EXOTIC_CASES, Boundary, DualBilliard, Table, TransversalField
from .errors import (
    InvalidCase,
    NotHomogeneous,
    OnPolarLocus,
    ProportionalConics,
    SingularPoint,
    TangentLine,
    ZeroVelocity,
)
from .polynomials import HomogeneousPolynomial as Poly

POLAR_LOCUS_TOL = 1e-12
JUMP_FLOOR = 1e-6


@dataclass(frozen=True)
class MomentVector:
    """``M = (x1, x2, 1) x (v1, v2, 0) = (-v2, v1, x1 v2 - x2 v1)``."""

    M: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M", np.asarray(self.M, dtype=float))

    def __array__(self, dtype=None, copy=None):
        return self.M if dtype is None else self.M.astype(dtype)

    def __iter__(self):
        return iter(self.M)


def moment_vector(x, v) -> MomentVector:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise ZeroVelocity("direction must be nonzero")
    return MomentVector(np.array([-v[1], v[0], x[0] * v[1] - x[1] * v[0]]))


@dataclass(frozen=True)
class RationalIntegral:
    numerator: Poly
    denominator: Poly
    name: str = ""

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ValueError("zero denominator")
        if not self.numerator.is_zero() and self.numerator.degree != self.denominator.degree:
            raise NotHomogeneous("numerator and denominator degrees differ")

    @property
    def degree(self) -> int:
        return self.denominator.degree

    def __call__(self, m) -> float:
        return eval_rational_integral(self, m)

    def evaluate_exact(self, m) -> Fraction:
        """Exact value at the rational point given by the float coordinates of ``m``."""
        m = np.asarray(m, dtype=float)
        num = self.numerator.evaluate_exact(m)
        den = self.denominator.evaluate_exact(m)
        if den == 0 or abs(den) <= POLAR_LOCUS_TOL * _monomial_scale(self.denominator, m):
            raise OnPolarLocus("denominator vanishes")
        return num / den

    def to_string(self) -> str:
        return f"({self.numerator.to_string()}) / ({self.denominator.to_string()})"


def _monomial_scale(p: Poly, m) -> float:
    """Size of the largest term, the reference for 'relatively zero'."""
    a = np.abs(np.asarray(m, dtype=complex))
    return max((abs(float(c)) * a[0] ** i * a[1] ** j * a[2] ** l for (i, j, l), c in p.terms().items()),
               default=0.0)


def eval_rational_integral(R: RationalIntegral, m) -> float | complex:
    m = np.asarray(m)
    den = R.denominator(m)
    if abs(den) <= POLAR_LOCUS_TOL * _monomial_scale(R.denominator, m):
        raise OnPolarLocus("denominator vanishes at M")
    val = R.numerator(m) / den
    return val.real if np.iscomplexobj(val) and abs(val.imag) <= 1e-14 * abs(val) else val


# --------------------------------------------------------------------------
# constructors

M1, M2, M3 = (Poly.variable(k) for k in range(3))
# velocity-form variables
V1, V2, DELTA = M2, -M1, M3


def _two_a_coefficients(case: str, n: int) -> list[Fraction]:
    if case == "2a1":
        return [Fraction(-4 * j * (2 * n + 1 - j), (2 * n + 1 - 2 * j) ** 2) for j in range(1, n + 1)]
    return [Fraction(-j * (2 * n + 2 - j), (n + 1 - j) ** 2) for j in range(1, n + 1)]


def canonical_integral(case: str, N: int | None = None) -> RationalIntegral:
    """The canonical integral of the exotic billiard ``case`` in moment variables."""
    q = 4 * V1 * DELTA - V2 ** 2
    if case in ("2a1", "2a2"):
        if N is None or int(N) != N or N < 1:
            raise InvalidCase(f"case {case} needs an integer N >= 1")
        n = int(N)
        prod = Poly.constant(1)
        for c in _two_a_coefficients(case, n):
            prod = prod * (4 * V1 * DELTA - c * V2 ** 2)
        if case == "2a1":
            return RationalIntegral(q ** (2 * n + 1), V1 ** 2 * prod ** 2, f"2a1(N={n})")
        return RationalIntegral(q ** (n + 1), V1 * V2 * prod, f"2a2(N={n})")
    if case == "2b1":
        den = (4 * V1 * DELTA + 3 * V2 ** 2) * (2 * V1 + V2) * (2 * DELTA + V2)
        return RationalIntegral(q ** 2, den, case)
    if case == "2b2":
        den = (V2 ** 2 + 4 * DELTA ** 2 + 4 * V1 * DELTA + 4 * V1 ** 2) * (V2 ** 2 + 4 * V1 ** 2)
        return RationalIntegral(q ** 2, den, case)
    if case == "2c1":
        return RationalIntegral(q ** 3, (V1 ** 3 + DELTA ** 3 + V1 * V2 * DELTA) ** 2, case)
    if case == "2c2":
        inner = (V2 ** 3 + 2 * V2 ** 2 * V1 + (V1 ** 2 + 2 * V2 ** 2 + 5 * V1 * V2) * DELTA
                 + V1 * DELTA ** 2)
        return RationalIntegral(q ** 3, inner ** 2, case)
    if case == "2d":
        cubic = (8 * V1 * V2 ** 2 + 2 * V2 ** 3 + (4 * V1 ** 2 + 5 * V2 ** 2 + 28 * V1 * V2) * DELTA
                 + 16 * V1 * DELTA ** 2)
        den = (V1 * DELTA + 2 * V2 ** 2) * (2 * V1 + V2) * cubic
        return RationalIntegral(q ** 3, den, case)
    raise InvalidCase(f"unknown case {case!r}; expected one of {EXOTIC_CASES}")


def pencil_ratio_integral(U, A) -> RationalIntegral:
    """``<U M, M> / <A M, M>``; its level sets are the conics of the pencil spanned by U and A."""
    u = np.asarray(getattr(U, "matrix", U), dtype=float)
    a = np.asarray(getattr(A, "matrix", A), dtype=float)
    uf, af = u.ravel(), a.ravel()
    wedge = np.linalg.norm(np.outer(uf, af) - np.outer(af, uf)) / (np.linalg.norm(uf) * np.linalg.norm(af))
    if wedge < 1e-12:
        raise ProportionalConics("pencil generators are proportional")
    return RationalIntegral(Poly.quadratic_form(u), Poly.quadratic_form(a), "pencil-ratio")


def invariant_curve_integral(H: Poly, d: int) -> RationalIntegral:
    """``H^2 / (M1^2 + M2^2)^d`` for a form ``H`` of degree ``d``."""
    if not isinstance(H, Poly):
        H = Poly.from_terms(H)
    if not H.is_zero() and H.degree != d:
        raise NotHomogeneous(f"H has degree {H.degree}, expected {d}")
    return RationalIntegral(H * H, (M1 ** 2 + M2 ** 2) ** d, "invariant-curve")


# --------------------------------------------------------------------------
# conservation checks


@dataclass
class InvarianceReport:
    residuals: list[float]
    tol: float
    skipped: int = 0
    samples: list[tuple] = field(default_factory=list)

    @property
    def max(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def mean(self) -> float:
        return float(np.mean(self.residuals)) if self.residuals else 0.0

    @property
    def failures(self) -> int:
        return sum(r >= self.tol for r in self.residuals)

    @property
    def passed(self) -> bool:
        return bool(self.residuals) and self.failures == 0


@dataclass
class DualInvarianceReport(InvarianceReport):
    primal: InvarianceReport | None = None

    @property
    def verdicts_agree(self) -> bool:
        return self.primal is None or self.primal.passed == self.passed


def relative_jump(R: RationalIntegral, m_in, m_out) -> float:
    a = R.evaluate_exact(m_in)
    b = R.evaluate_exact(m_out)
    floor = Fraction(JUMP_FLOOR)
    return float(abs(a - b) / max(abs(a), abs(b), floor))


def _allowed(table: Table, t: float, exclusion: float) -> bool:
    return all(table.boundary.parameter_distance(t, s) >= exclusion for s in table.excluded)


def sample_parameters(table: Table, rng: np.random.Generator, exclusion: float):
    """Endless stream of boundary parameters away from the singular set."""
    lo, hi = table.boundary.sample_domain
    while True:
        t = float(rng.uniform(lo, hi))
        if _allowed(table, t, exclusion):
            yield t


def check_reflection_invariance(R: RationalIntegral, boundary: Boundary, fld: TransversalField | Table,
                                n_samples: int = 200, seed: int = 0, tol: float = 1e-8,
                                exclusion: float = 1e-3) -> InvarianceReport:
    """Relative jump of ``R`` across ``n_samples`` random reflections."""
    table = fld if isinstance(fld, Table) else Table(boundary, fld)
    rng = np.random.default_rng(seed)
    report = InvarianceReport([], tol)
    params = sample_parameters(table, rng, exclusion)
    attempts = 0
    while len(report.residuals) < n_samples:
        attempts += 1
        if attempts > 50 * n_samples + 100:
            break
        t = next(params)
        phi = float(rng.uniform(0.0, math.pi))
        x = boundary.point(t)
        v = np.array([math.cos(phi), math.sin(phi)])
        try:
            v_out = table.reflect(t, v)
            jump = relative_jump(R, moment_vector(x, v).M, moment_vector(x, v_out).M)
        except (OnPolarLocus, SingularPoint, ZeroVelocity):
            report.skipped += 1
            continue
        report.residuals.append(jump)
        report.samples.append((t, phi))
    return report


def check_dual_invariance(R: RationalIntegral, dual: DualBilliard, n_samples: int = 200, seed: int = 0,
                          tol: float = 1e-8, exclusion: float = 1e-3, method: str = "auto",
                          cross_check: bool = True) -> DualInvarianceReport:
    """Compare ``R(a)`` with ``R(sigma_P(a))`` for random ``P`` on the dual curve and ``a`` on ``L_P``."""
    table = dual.table
    rng = np.random.default_rng(seed)
    report = DualInvarianceReport([], tol)
    params = sample_parameters(table, rng, exclusion)
    attempts = 0
    while len(report.residuals) < n_samples:
        attempts += 1
        if attempts > 50 * n_samples + 100:
            break
        t = next(params)
        phi = float(rng.uniform(0.0, math.pi))
        try:
            sigma = dual.involution(t, method)
            a = sigma.basis @ np.array([math.cos(phi), math.sin(phi)])
            b = np.real_if_close(sigma.apply_array(a))
            if np.iscomplexobj(b):
                raise OnPolarLocus("image is not real")
            jump = relative_jump(R, a, b)
        except (OnPolarLocus, SingularPoint, TangentLine):
            report.skipped += 1
            continue
        report.residuals.append(jump)
        report.samples.append((t, phi))
    if cross_check:
        report.primal = check_reflection_invariance(R, table.boundary, table, n_samples, seed, tol, exclusion)
    return report
