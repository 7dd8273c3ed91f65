"""Dual-pencil fields via form-orthogonality and their constant-curvature models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .billiards import (
    ConicBoundary,
    SurfaceModel,
    Table,
    TransversalField,
)
from .errors import (
    AlphaEqualsC,
    LiftDomainEmpty,
    NoConvergence,
    RankMismatch,
    SelfOrthogonalTangent,
    SingularPoint,
    UnsupportedSignature,
)
from .projgeo import Conic, ProjectiveMap, adjugate

ZERO_EIGEN_TOL = 1e-9
DEFAULT_STEPS = (1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class FormSignature:
    positive: int
    negative: int
    zero: int

    def __iter__(self):
        return iter((self.positive, self.negative, self.zero))


def form_signature(A, tol: float = ZERO_EIGEN_TOL) -> FormSignature:
    w = np.linalg.eigvalsh(np.asarray(A, dtype=float))
    scale = max(np.max(np.abs(w)), 1e-300)
    pos = int(np.sum(w > tol * scale))
    neg = int(np.sum(w < -tol * scale))
    return FormSignature(pos, neg, 3 - pos - neg)


@dataclass(frozen=True)
class NormalizationResult:
    """``map.T @ normalized @ map = scale * form`` with ``map`` a real coordinate change."""

    map: ProjectiveMap
    model: SurfaceModel
    normalized: np.ndarray
    scale: float

    @property
    def inverse_map(self) -> ProjectiveMap:
        """``T^{-1}``: its congruence takes the original form to the normalised one."""
        return self.map.inverse()

    def congruence_residual(self, form) -> float:
        form = np.asarray(form, dtype=float)
        t = self.map.matrix
        lhs = t.T @ self.normalized @ t
        return float(np.linalg.norm(lhs - self.scale * form) / np.linalg.norm(self.scale * form))


def normalize_form(A) -> NormalizationResult:
    """Congruence to ``diag(1,1,1)``, ``diag(1,1,-1)`` or ``diag(1,1,0)``.

    New coordinates are ``y = T x``; the form becomes ``<N y, y>`` with
    ``T^T N T = s A`` for a sign ``s``.  Eigenvalues are ordered descending and
    eigenvectors get a deterministic sign (largest component positive).
    """
    a = np.asarray(A, dtype=float)
    if not np.any(a):
        raise UnsupportedSignature("zero form")
    a = (a + a.T) / 2
    sig = form_signature(a)
    if sig.positive < sig.negative or (sig.positive == sig.negative and sig.zero == 1):
        s = -1.0
    else:
        s = 1.0
    w, vecs = np.linalg.eigh(s * a)
    spread = max(np.max(np.abs(w)), 1e-300)
    # descending eigenvalues; ties keep the original axis order
    order = sorted(range(3), key=lambda k: (-round(w[k] / spread, 9), int(np.argmax(np.abs(vecs[:, k])))))
    w, vecs = w[order], vecs[:, order]
    for k in range(3):
        j = int(np.argmax(np.abs(vecs[:, k])))
        if vecs[j, k] < 0:
            vecs[:, k] = -vecs[:, k]
    p, n, z = form_signature(s * a)
    if (p, n, z) == (3, 0, 0):
        model = SurfaceModel.sphere()
    elif (p, n, z) == (2, 1, 0):
        model = SurfaceModel.hyperbolic()
    elif (p, n, z) == (2, 0, 1):
        model = SurfaceModel.plane()
    else:
        raise UnsupportedSignature(f"signature {tuple(sig)} has no constant-curvature model")
    scale = max(np.max(np.abs(w)), 1e-300)
    mags = np.array([math.sqrt(abs(x)) if abs(x) > ZERO_EIGEN_TOL * scale else 1.0 for x in w])
    t = np.diag(mags) @ vecs.T
    return NormalizationResult(ProjectiveMap(t), model, model.form.copy(), s)


def a_orthogonal_field(boundary: ConicBoundary, A) -> TransversalField:
    """Field whose line at ``x`` is the form-orthogonal complement of the tangent plane, joined through ``x``."""
    a = np.asarray(A, dtype=float)
    if boundary.conic is not None and np.linalg.matrix_rank(a) == 3 and Conic(a).equals(boundary.conic, 1e-10):
        raise AlphaEqualsC("form conic coincides with the boundary")
    return TransversalField.a_orthogonal(a)


def a_orthogonal_line(boundary: ConicBoundary, A, t: float) -> np.ndarray:
    """Field line at parameter ``t``, checking that the tangent plane is not isotropic."""
    a = np.asarray(A, dtype=float)
    r = boundary.homogeneous(t)
    tan = boundary.tangent(t)
    h2 = np.array([tan[0], tan[1], 0.0])
    gram = np.array([[r @ a @ r, r @ a @ h2], [h2 @ a @ r, h2 @ a @ h2]])
    size = max(np.linalg.norm(a) * np.linalg.norm(r) * np.linalg.norm(h2), 1e-300)
    if abs(np.linalg.det(gram)) <= 1e-12 * size ** 2:
        raise SelfOrthogonalTangent(f"tangent plane at parameter {t} is isotropic")
    n = np.cross(a @ r, a @ h2)
    return np.cross(r, n)


@dataclass
class EquivalenceReport:
    model: str
    residuals: list[float]
    tol: float
    form_residuals: list[float] = field(default_factory=list)
    skipped: int = 0

    @property
    def max(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return bool(self.residuals) and self.max < self.tol


def _line_angle(l1, l2) -> float:
    """Sine of the angle between two affine lines given by coefficients."""
    n1 = np.asarray(l1[:2], dtype=float)
    n2 = np.asarray(l2[:2], dtype=float)
    return float(abs(n1[0] * n2[1] - n1[1] * n2[0]) / (np.linalg.norm(n1) * np.linalg.norm(n2)))


def liftable_arcs(boundary: ConicBoundary, norm: NormalizationResult, grid: int = 2048) -> list[tuple[float, float]]:
    """Maximal parameter intervals whose points lift to the model surface."""
    lo, hi = boundary.sample_domain
    ts = np.linspace(lo, hi, grid + 1)
    t_map = norm.map.matrix

    def ok(t):
        y = t_map @ boundary.homogeneous(t)
        if norm.model.tag == "hyperbolic":
            return y @ norm.normalized @ y < 0
        if norm.model.tag == "plane":
            return abs(y[2]) > 1e-9 * np.linalg.norm(y)
        return True

    flags = [ok(t) for t in ts]
    arcs, start = [], None
    for t, f in zip(ts, flags):
        if f and start is None:
            start = t
        elif not f and start is not None:
            arcs.append((start, t))
            start = None
    if start is not None:
        arcs.append((start, ts[-1]))
    return arcs


def equivalence_check(boundary: ConicBoundary, fld: TransversalField, A, n_samples: int = 100,
                      seed: int = 0, tol: float = 1e-9) -> EquivalenceReport:
    """Compare the projective reflection with the surface reflection in normalised coordinates."""
    norm = normalize_form(A)
    arcs = liftable_arcs(boundary, norm)
    if not arcs:
        raise LiftDomainEmpty("no boundary arc lifts to the model surface")
    table = Table(boundary, fld)
    model = norm.model
    t_map = norm.map.matrix
    lengths = np.array([b - a for a, b in arcs])
    rng = np.random.default_rng(seed)
    report = EquivalenceReport(model.tag, [], tol)
    while len(report.residuals) < n_samples:
        k = int(rng.choice(len(arcs), p=lengths / lengths.sum()))
        a, b = arcs[k]
        t = float(rng.uniform(a, b))
        phi = float(rng.uniform(0.0, math.pi))
        v = np.array([math.cos(phi), math.sin(phi)])
        try:
            v_proj = table.reflect(t, v)
        except SingularPoint:
            report.skipped += 1
            continue
        line_proj = np.cross(boundary.homogeneous(t), np.array([v_proj[0], v_proj[1], 0.0]))
        y = t_map @ boundary.homogeneous(t)
        tan = t_map @ np.array([*boundary.tangent(t), 0.0])
        vel = t_map @ np.array([v[0], v[1], 0.0])
        X = _lift(model, y)
        V = model.tangent_projection(X, vel)
        J = model.reflection(X, np.cross(y, tan))
        W = J(V)
        line_surf = t_map.T @ np.cross(X, W)
        report.residuals.append(_line_angle(line_proj, line_surf))
        report.form_residuals.append(float(abs(W @ model.form @ W - V @ model.form @ V)
                                           / max(abs(V @ model.form @ V), 1e-300)))
    return report


def _lift(model: SurfaceModel, y) -> np.ndarray:
    if model.tag == "plane":
        return y / y[2]
    q = y @ model.form @ y
    return y / math.sqrt(abs(q))


def degenerate_pencil_limit(U, A, lam0: float, steps=DEFAULT_STEPS, tol: float = 1e-7) -> np.ndarray:
    """Limit of the rescaled adjugates ``adj(U - lam A)`` as ``lam -> lam0``.

    The adjugate at ``lam0 + h`` is quadratic in ``h`` and vanishes at
    ``h = 0`` (rank one), so ``adj / h`` is affine in ``h``.  Richardson
    extrapolation over consecutive steps removes the linear term; each
    extrapolant is rescaled by its largest entry and successive ones must agree
    within ``tol``.
    """
    u = np.asarray(U, dtype=float)
    a = np.asarray(A, dtype=float)
    m0 = u - lam0 * a
    sv = np.linalg.svd(m0, compute_uv=False)
    if sv[0] == 0 or sv[1] > 1e-9 * sv[0]:
        raise RankMismatch(f"U - lam0 A must have rank 1 (singular values {sv})")

    def scaled(h):
        # adj vanishes at h = 0 and is quadratic in h, so adj / h is affine in h
        return adjugate(u - (lam0 + h) * a) / h

    steps = sorted(steps, reverse=True)
    mats = [scaled(h) for h in steps]
    extrap = []
    for (h1, m1), (h2, m2) in zip(zip(steps, mats), zip(steps[1:], mats[1:])):
        e = (h1 * m2 - h2 * m1) / (h1 - h2)
        k = np.unravel_index(np.argmax(np.abs(e)), e.shape)
        if abs(e[k]) <= 1e-12 * max(np.linalg.norm(m) for m in mats):
            raise NoConvergence("rescaled adjugates tend to zero; eigenvalue ratio has no nonzero limit")
        extrap.append(e / e[k])
    diff = np.linalg.norm(extrap[-1] - extrap[-2]) if len(extrap) >= 2 else 0.0
    if not np.all(np.isfinite(extrap[-1])) or diff >= tol:
        raise NoConvergence(f"rescaled adjugates do not settle (difference {diff:.3g})")
    limit = extrap[-1]
    limit = (limit + limit.T) / 2
    limit[np.abs(limit) < tol] = 0.0
    if np.linalg.matrix_rank(limit, tol=1e-6 * np.linalg.norm(limit)) > 2:
        raise RankMismatch("limit is not degenerate")
    return limit


def fields_agree(boundary: ConicBoundary, f1: TransversalField, f2: TransversalField, n_samples: int = 200,
                 seed: int = 0, exclusion: float = 1e-3) -> list[float]:
    """Sine-of-angle discrepancies between two fields' lines at random boundary points."""
    t1, t2 = Table(boundary, f1), Table(boundary, f2)
    rng = np.random.default_rng(seed)
    lo, hi = boundary.sample_domain
    out = []
    excluded = list(t1.excluded) + list(t2.excluded)
    while len(out) < n_samples:
        t = float(rng.uniform(lo, hi))
        if any(boundary.parameter_distance(t, s) < exclusion for s in excluded):
            continue
        out.append(_line_angle(t1.field_line(t).coords, t2.field_line(t).coords))
    return out
