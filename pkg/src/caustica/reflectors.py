"""Reflection involutions: Euclidean mirror, projective billiard reflection,
form-preserving space involutions and line involutions of dual billiards."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CoincidentEigenlines,
    DegenerateRestriction,
    LineInConic,
    NotInPencil,
    NotThroughQ,
    TangentLine,
    ZeroVector,
)
from .projgeo import (
    DEFAULT_TOL,
    Conic,
    HomogeneousLine,
    HomogeneousPoint,
    _lines_through,
    proj_distance,
    real_if_close,
    solve_binary_quadratic,
)

TANGENT_SEPARATION = 1e-7


def _canonical_matrix(m: np.ndarray) -> np.ndarray:
    """Unit Frobenius norm, first non-negligible entry made real positive."""
    m = np.asarray(m)
    m = m / np.linalg.norm(m)
    flat = m.ravel()
    k = int(np.flatnonzero(np.abs(flat) > 1e-12)[0])
    phase = flat[k] / abs(flat[k])
    return real_if_close(m / phase)


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class PlaneInvolution:
    """Linear involution of the tangent plane at ``point``.

    ``matrix`` has eigenvalue +1 on ``plus_dir`` (the boundary tangent) and
    -1 on ``minus_dir`` (the transversal line).
    """

    matrix: np.ndarray
    plus_dir: np.ndarray
    minus_dir: np.ndarray
    point: np.ndarray | None = None

    def __call__(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v)

    def canonical(self) -> np.ndarray:
        return _canonical_matrix(self.matrix)

    def involution_residual(self) -> float:
        m = self.matrix
        return float(np.linalg.norm(m @ m - np.eye(2)))

    def homology(self) -> np.ndarray:
        """3x3 projective extension: fixes the tangent line pointwise, negates the transversal point at infinity."""
        if self.point is None:
            raise ValueError("involution has no base point")
        return projective_reflection_matrix(self.point, self.plus_dir, self.minus_dir)


@dataclass(frozen=True)
class SpaceInvolution:
    """Involution ``J`` of R^3 fixing a 2-plane pointwise and preserving ``form``."""

    matrix: np.ndarray
    form: np.ndarray

    def __call__(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v)

    def form_residual(self) -> float:
        j, a = self.matrix, self.form
        return float(np.linalg.norm(j.T @ a @ j - a) / max(np.linalg.norm(a), 1e-300))

    def involution_residual(self) -> float:
        """``|J^2 - I|`` relative to ``|J|^2`` (J is ill-conditioned near isotropic planes)."""
        j = self.matrix
        return float(np.linalg.norm(j @ j - np.eye(3)) / max(1.0, np.linalg.norm(j) ** 2))


@dataclass(frozen=True)
class LineInvolution:
    """Projective involution of a line ``L`` parameterised by ``basis`` (3x2).

    ``matrix`` acts on basis coordinates and is stored canonicalised (unit
    Frobenius norm); only its projective action matters.
    """

    basis: np.ndarray
    matrix: np.ndarray
    fixed_point: np.ndarray
    line: np.ndarray = field(default=None)

    def coordinates(self, p) -> np.ndarray:
        coef, *_ = np.linalg.lstsq(self.basis, np.asarray(p, dtype=complex), rcond=None)
        return coef

    def __call__(self, p) -> HomogeneousPoint:
        p = np.asarray(p)
        coef = self.coordinates(p)
        img = self.basis @ (self.matrix @ coef)
        return HomogeneousPoint(real_if_close(img))

    def apply_array(self, p) -> np.ndarray:
        return np.asarray(self(p).coords)

    def involution_residual(self) -> float:
        m = self.matrix
        sq = m @ m
        return float(np.linalg.norm(sq - sq[0, 0] * np.eye(2)) / np.linalg.norm(sq))

    def equals(self, other: "LineInvolution", tol: float = 1e-9) -> bool:
        """Same projective action on the same line (tested on three points)."""
        probes = [self.basis[:, 0], self.basis[:, 1], self.basis[:, 0] + 0.7 * self.basis[:, 1]]
        for q in probes:
            if proj_distance(self(q).coords, other(q).coords) > tol:
                return False
        return True


def mirror_reflection(tangent_dir, v) -> np.ndarray:
    """Euclidean mirror image of ``v`` across the direction ``tangent_dir``."""
    t = np.asarray(tangent_dir, dtype=float)
    n2 = t @ t
    if n2 == 0:
        raise ZeroVector("tangent direction is zero")
    v = np.asarray(v)
    return 2 * (v @ t) / n2 * t - v


def involution_from_directions(tangent_dir, field_dir, point=None,
                               tol: float = DEFAULT_TOL) -> PlaneInvolution:
    """Involution fixing ``tangent_dir`` and negating ``field_dir``."""
    t = np.asarray(tangent_dir)
    n = np.asarray(field_dir)
    if np.linalg.norm(t) == 0 or np.linalg.norm(n) == 0:
        raise ZeroVector("eigen-direction is zero")
    wedge = abs(_cross2(t, n)) / (np.linalg.norm(t) * np.linalg.norm(n))
    if wedge <= tol:
        raise CoincidentEigenlines("tangent and transversal directions coincide")
    basis = np.column_stack([t, n])
    m = basis @ np.diag([1.0, -1.0]) @ np.linalg.inv(basis)
    m = real_if_close(m)
    pt = None if point is None else np.asarray(point)
    return PlaneInvolution(m, t, n, pt)


def build_projective_involution(t: HomogeneousLine, n: HomogeneousLine, q: HomogeneousPoint,
                                tol: float = DEFAULT_TOL) -> PlaneInvolution:
    """Projective billiard involution at ``q`` with eigenlines ``t`` (+1) and ``n`` (-1)."""
    for line in (t, n):
        if line.residual(q.coords) > tol:
            raise NotThroughQ(f"{line} does not pass through {q}")
    if proj_distance(t.coords, n.coords) <= tol:
        raise CoincidentEigenlines("eigenlines coincide")
    return involution_from_directions(t.direction(), n.direction(), q.affine(), tol)


def projective_reflection_matrix(point, tangent_dir, field_dir) -> np.ndarray:
    """Harmonic homology of RP^2 with axis the tangent line and centre the transversal point at infinity.

    ``J = I - 2 n l^T / (l . n)``; on the pencil of lines through ``point`` it
    acts exactly as the planar involution.  Lines transform by ``J^T``.
    """
    x = np.asarray(point)
    r = np.array([x[0], x[1], 1.0])
    t = np.asarray(tangent_dir)
    l = np.cross(r, np.array([t[0], t[1], 0.0]))
    d = np.asarray(field_dir)
    n = np.array([d[0], d[1], 0.0])
    ln = l @ n
    if abs(ln) <= DEFAULT_TOL * np.linalg.norm(l) * np.linalg.norm(n):
        raise CoincidentEigenlines("transversal direction lies on the tangent line")
    return np.eye(3) - 2 * np.outer(n, l) / ln


def reflect_line_pencil(inv: PlaneInvolution, line: HomogeneousLine,
                        tol: float = DEFAULT_TOL) -> HomogeneousLine:
    """Image of a (possibly complex) line through the base point under the involution."""
    if inv.point is None:
        raise ValueError("involution has no base point")
    x = inv.point
    r = np.array([x[0], x[1], 1.0])
    if line.residual(r) > tol:
        raise NotThroughQ("line does not pass through the reflection point")
    d = inv.matrix @ line.direction()
    img = np.cross(r.astype(d.dtype), np.array([d[0], d[1], 0.0]))
    return HomogeneousLine(real_if_close(img))


def _a_normal(form: np.ndarray, h1, h2) -> np.ndarray:
    """Direction ``n`` with ``h1^T A n = h2^T A n = 0``."""
    return np.cross(form @ h1, form @ h2)


def space_involution(form, h1, h2, tol: float = DEFAULT_TOL) -> SpaceInvolution:
    """Form-preserving involution fixing ``span{h1, h2}`` pointwise (projector recipe).

    ``J = I - 2 n l^T / (l . n)`` where ``l = h1 x h2`` is the covector of the
    plane and ``n`` its form-normal.  For a non-degenerate form this is the
    familiar ``v - 2 <n, v>_A / <n, n>_A n``; for a rank-2 form the normal
    is the kernel direction and the same formula still preserves the form.
    """
    a = np.asarray(form, dtype=float)
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    l = np.cross(h1, h2)
    if np.linalg.norm(l) == 0:
        raise ZeroVector("spanning vectors are dependent")
    n = _a_normal(a, h1, h2)
    nn = np.linalg.norm(n)
    ln = l @ n
    if nn == 0 or abs(ln) <= tol * np.linalg.norm(l) * nn:
        raise DegenerateRestriction("form-normal lies inside the plane (isotropic tangency)")
    return SpaceInvolution(np.eye(3) - 2 * np.outer(n, l) / ln, a)


def space_involution_eigen(form, h1, h2, tol: float = DEFAULT_TOL) -> SpaceInvolution:
    """Same involution built from its eigenbasis ``{h1, h2, n}`` with eigenvalues ``(1, 1, -1)``."""
    a = np.asarray(form, dtype=float)
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    n = _a_normal(a, h1, h2)
    e = np.column_stack([h1, h2, n])
    s = np.linalg.svd(e, compute_uv=False)
    if s[-1] <= tol * s[0]:
        raise DegenerateRestriction("form-normal lies inside the plane (isotropic tangency)")
    return SpaceInvolution(e @ np.diag([1.0, 1.0, -1.0]) @ np.linalg.inv(e), a)


def constant_curvature_reflection(form, plane, v) -> np.ndarray:
    """Reflect ``v`` by the form-preserving involution fixing the 2-plane ``plane = (h1, h2)``."""
    h1, h2 = plane
    return space_involution(form, h1, h2)(v)


def line_involution_fixing_point(p: HomogeneousPoint, line: HomogeneousLine, c: Conic,
                                 tol: float = DEFAULT_TOL) -> LineInvolution:
    """The unique involution of ``line`` fixing ``p`` and swapping ``line`` ∩ ``c``.

    Its second fixed point is the polar of ``p`` with respect to the binary
    quadratic ``c`` restricted to the line, i.e. the harmonic conjugate of ``p``
    with respect to the intersection pair.
    """
    vl = np.asarray(line.coords)
    vp = np.asarray(p.coords)
    if line.residual(vp) > tol:
        raise NotInPencil("fixed point is not on the line")
    u, w = _lines_through(vl)
    basis = np.column_stack([u / np.linalg.norm(u), w / np.linalg.norm(w)])
    restricted = basis.T @ c.matrix @ basis
    scale = np.linalg.norm(c.matrix)
    if np.linalg.norm(restricted) <= 1e-12 * scale:
        raise LineInConic("line lies inside the conic")
    roots = solve_binary_quadratic(restricted[0, 0], restricted[0, 1], restricted[1, 1])
    r1, r2 = (r / np.linalg.norm(r) for r in roots)
    if abs(_cross2(r1, r2)) < TANGENT_SEPARATION:
        raise TangentLine("intersection pair collapses")
    coef, *_ = np.linalg.lstsq(basis.astype(complex), vp.astype(complex), rcond=None)
    coef = coef / np.linalg.norm(coef)
    if abs(coef @ restricted @ coef) <= TANGENT_SEPARATION * np.linalg.norm(restricted):
        raise TangentLine("fixed point lies on the conic")
    other = np.array([[0, -1], [1, 0]]) @ (restricted @ coef)
    eig = np.column_stack([coef, other])
    m = eig @ np.diag([1.0, -1.0]) @ np.linalg.inv(eig)
    return LineInvolution(basis, _canonical_matrix(m), real_if_close(vp), vl)


def line_involution_from_plane(inv: PlaneInvolution) -> LineInvolution:
    """Dual of a planar reflection under orthogonal polarity.

    Lines through ``Q`` with direction ``d`` are the points ``K d`` of the dual
    line ``Q*``, where ``K = [r x e1, r x e2]``; the involution acts on ``d``.
    """
    if inv.point is None:
        raise ValueError("involution has no base point")
    x = inv.point
    r = np.array([x[0], x[1], 1.0])
    e = np.eye(3)
    k = np.column_stack([np.cross(r, e[0]), np.cross(r, e[1])])
    fixed = k @ inv.plus_dir
    return LineInvolution(k, _canonical_matrix(inv.matrix), real_if_close(fixed), r)
