"""Conic pencils, complex caustics, invariant curves of dual billiards, tangential correspondence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .billiards import Boundary, DualBilliard, SurfaceModel, Table, TransversalField, lift_to_surface
from .errors import (
    DegenerateRestriction,
    SingularCurvePoint,
    SingularParameter,
    SingularPoint,
    TangentLine,
)
from .projgeo import (
    Conic,
    HomogeneousLine,
    HomogeneousPoint,
    adjugate,
    conic_intersections,
    line_conic_intersection,
    proj_distance,
    tangent_lines_from_point,
)

SINGULAR_DET_TOL = 1e-12
PAIR_MATCH_TOL = 1e-6


def _relative_det(m: np.ndarray) -> float:
    return abs(np.linalg.det(m)) / max(np.linalg.norm(m) ** 3, 1e-300)


@dataclass(frozen=True)
class ConfocalPencil:
    """Family ``adj(B - lam A)`` of conics confocal with respect to the form ``A``."""

    B: np.ndarray
    A: np.ndarray

    @classmethod
    def euclidean(cls, a: float, b: float) -> "ConfocalPencil":
        """Confocal family of the ellipse ``x^2/a^2 + y^2/b^2 = 1``."""
        return cls(np.diag([a * a, b * b, -1.0]), np.diag([1.0, 1.0, 0.0]))

    @classmethod
    def of_conic(cls, c: Conic, A=np.diag([1.0, 1.0, 0.0])) -> "ConfocalPencil":
        """Confocal family of ``c``; for central conics scaled so ``lam`` matches :meth:`euclidean`."""
        b = np.array(c.adjugate())
        scale = -b[2, 2] if abs(b[2, 2]) > 1e-12 * np.max(np.abs(b)) else np.max(np.abs(b))
        return cls(b / scale, np.asarray(A, dtype=float))

    def member(self, lam: float) -> Conic:
        m = self.B - lam * self.A
        if _relative_det(m) < SINGULAR_DET_TOL:
            raise SingularParameter(f"member {lam} is degenerate")
        return Conic(adjugate(m))


def confocal_member(pencil: ConfocalPencil, lam: float) -> Conic:
    return pencil.member(lam)


@dataclass(frozen=True)
class DualPencilFamily:
    """Pencil ``U - lam A`` of conics in the dual (moment) plane."""

    U: np.ndarray
    A: np.ndarray

    def member(self, lam: float) -> tuple[Conic, Conic]:
        """M-side member and its dual conic in the original plane."""
        m = np.asarray(self.U, dtype=float) - lam * np.asarray(self.A, dtype=float)
        if _relative_det(m) < SINGULAR_DET_TOL:
            raise SingularParameter(f"member {lam} is degenerate")
        return Conic(m), Conic(adjugate(m))

    def base_points(self) -> list[HomogeneousPoint]:
        return conic_intersections(Conic(self.U), Conic(self.A))

    def field(self, lam: float) -> TransversalField:
        """Dual-pencil transversal field defined by the member at ``lam``."""
        m = np.asarray(self.U, dtype=float) - lam * np.asarray(self.A, dtype=float)
        return TransversalField.dual_pencil_from_dual(m)


def dual_pencil_member(fam: DualPencilFamily, lam: float) -> tuple[Conic, Conic]:
    return fam.member(lam)


@dataclass
class CausticReport:
    residuals: list[float]
    tol: float
    permuted: int = 0
    fixed: int = 0
    skipped: int = 0
    samples: list = field(default_factory=list)

    @property
    def max(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def mean(self) -> float:
        return float(np.mean(self.residuals)) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return bool(self.residuals) and self.max < self.tol


def low_discrepancy_parameters(table: Table, n: int, seed: int, exclusion: float = 1e-3) -> list[float]:
    """``n`` scrambled Halton parameters in the sample domain avoiding singular neighbourhoods."""
    lo, hi = table.boundary.sample_domain
    sampler = qmc.Halton(d=1, scramble=True, seed=seed)
    out: list[float] = []
    while len(out) < n:
        for u in sampler.random(max(n - len(out), 8))[:, 0]:
            t = lo + float(u) * (hi - lo)
            if all(table.boundary.parameter_distance(t, s) >= exclusion for s in table.excluded):
                out.append(t)
                if len(out) == n:
                    break
    return out


def _line_tangency_residual(alpha: Conic, line) -> float:
    ell = np.asarray(getattr(line, "coords", line))
    adj = alpha.adjugate()
    return float(abs(ell @ adj @ ell) / (np.linalg.norm(ell) ** 2 * np.linalg.norm(adj)))


def _pair_mapping(images, originals) -> tuple[str, float]:
    """Classify how two image lines relate to the original pair."""
    a, b = originals
    ia, ib = images
    swap = max(proj_distance(ia, b), proj_distance(ib, a))
    keep = max(proj_distance(ia, a), proj_distance(ib, b))
    if proj_distance(a, b) < PAIR_MATCH_TOL:
        return "fixed", keep
    if swap <= keep:
        return "permuted", swap
    return "fixed", keep


def reflection_homology(table: Table, t: float, model: SurfaceModel | None = None) -> np.ndarray:
    """3x3 matrix of the reflection at boundary parameter ``t``; lines map by its transpose."""
    if model is None:
        return table.involution(t).homology()
    r = table.boundary.homogeneous(t)
    ell = table.boundary.tangent_line(t).coords
    X = lift_to_surface(model, r)
    return model.reflection(X, np.real(ell)).matrix


def check_complex_caustic(boundary: Boundary, fld: TransversalField | Table | None, alpha: Conic,
                          n_samples: int = 300, seed: int = 0, tol: float = 1e-9,
                          model: SurfaceModel | None = None, exclusion: float = 1e-3) -> CausticReport:
    """Reflect both complex tangent lines from sampled boundary points to ``alpha``.

    With ``model`` given, the reflection is the surface involution of that
    model and ``fld`` may be ``None`` (the field is the projected normal field).
    """
    alpha.require_regular()
    if fld is None:
        fld = TransversalField.a_orthogonal(model.form) if model.tag != "plane" else TransversalField.normal()
    table = fld if isinstance(fld, Table) else Table(boundary, fld)
    report = CausticReport([], tol)
    for t in low_discrepancy_parameters(table, n_samples, seed, exclusion):
        Q = HomogeneousPoint(boundary.homogeneous(t))
        try:
            J = reflection_homology(table, t, model)
        except (SingularPoint, DegenerateRestriction):
            report.skipped += 1
            continue
        lines = [np.asarray(l.coords) for l in tangent_lines_from_point(Q, alpha)]
        images = [J.T @ l for l in lines]
        res = max(_line_tangency_residual(alpha, im) for im in images)
        kind, _ = _pair_mapping(images, lines)
        if kind == "permuted":
            report.permuted += 1
        else:
            report.fixed += 1
        report.residuals.append(res)
        report.samples.append(t)
    return report


def check_absolute_caustic(model: SurfaceModel, n_samples: int = 100, seed: int = 0,
                           tol: float = 1e-9) -> CausticReport:
    """Isotropic planes through a random tangent line are swapped by the reflection.

    A random point ``X`` on the surface and a random tangent direction span a
    geodesic 2-plane ``H``; the two planes through the line ``R X`` tangent to
    the isotropic cone must be permuted by the involution fixing ``H``.
    """
    if model.tag == "plane":
        raise ValueError("the planar model has a degenerate absolute")
    rng = np.random.default_rng(seed)
    absolute = model.absolute
    report = CausticReport([], tol)
    while len(report.residuals) < n_samples:
        if model.tag == "sphere":
            X = rng.normal(size=3)
            X /= np.linalg.norm(X)
        else:
            xy = rng.normal(size=2)
            X = np.array([xy[0], xy[1], math.sqrt(1 + xy @ xy)])
        T = model.tangent_projection(X, rng.normal(size=3))
        ell = np.cross(X, T)
        try:
            J = model.reflection(X, ell).matrix
        except DegenerateRestriction:
            report.skipped += 1
            continue
        lines = [np.asarray(l.coords) for l in tangent_lines_from_point(HomogeneousPoint(X), absolute)]
        images = [J.T @ l for l in lines]
        kind, setwise = _pair_mapping(images, lines)
        res = max(setwise, *(_line_tangency_residual(absolute, im) for im in images))
        if kind == "permuted":
            report.permuted += 1
        else:
            report.fixed += 1
        report.residuals.append(res)
    return report


def check_invariant_curve(dual: DualBilliard, S_star: Conic, n_samples: int = 200, seed: int = 0,
                          tol: float = 1e-9, method: str = "auto", exclusion: float = 1e-3) -> CausticReport:
    """``sigma_P`` must map the pair ``L_P`` ∩ ``S_star`` to itself."""
    report = CausticReport([], tol)
    for t in low_discrepancy_parameters(dual.table, n_samples, seed, exclusion):
        L = dual.tangent_line(t)
        try:
            sigma = dual.involution(t, method)
            pts = line_conic_intersection(L, S_star)
        except (SingularPoint, TangentLine):
            report.skipped += 1
            continue
        pair = [np.asarray(p.coords) for p in pts]
        images = [np.asarray(sigma(p).coords) for p in pair]
        kind, res = _pair_mapping(images, pair)
        if kind == "permuted":
            report.permuted += 1
        else:
            report.fixed += 1
        report.residuals.append(res)
        report.samples.append(t)
    return report


@dataclass(frozen=True)
class TangentialPair:
    A: np.ndarray
    B: HomogeneousPoint
    line: HomogeneousLine
    residual: float


def tangential_correspondence_at(A, alpha: Conic) -> list[TangentialPair]:
    """Both contact points ``B`` on ``alpha`` of the tangent lines through ``A``."""
    alpha.require_regular()
    a = np.asarray(A)
    r = a if a.shape == (3,) else np.array([a[0], a[1], 1.0])
    adj = alpha.adjugate()
    out = []
    for line in tangent_lines_from_point(HomogeneousPoint(r), alpha):
        ell = np.asarray(line.coords)
        B = adj @ ell
        if np.linalg.norm(B) <= 1e-14 * np.linalg.norm(adj) * np.linalg.norm(ell):
            # A lies on alpha: the contact point is A itself
            B = r.astype(complex)
        B = HomogeneousPoint(B)
        res = max(alpha.residual(B.coords), HomogeneousLine(alpha.matrix @ B.coords).residual(r))
        out.append(TangentialPair(a, B, line, res))
    return out


def tangential_correspondence_samples(curve: Boundary, alpha: Conic, n: int = 100,
                                      seed: int = 0) -> list[TangentialPair]:
    """Sample points ``A`` on ``curve`` and pair them with contact points on ``alpha``."""
    lo, hi = curve.sample_domain
    sampler = qmc.Halton(d=1, scramble=True, seed=seed)
    out = []
    for u in sampler.random(n)[:, 0]:
        t = lo + float(u) * (hi - lo)
        A = curve.point(t)
        if hasattr(curve, "gradient") and np.linalg.norm(curve.gradient(A)) <= 1e-10:
            raise SingularCurvePoint(f"singular point {A}")
        out.extend(tangential_correspondence_at(A, alpha))
    return out
