"""Projective-plane primitives over real and complex scalars.

Points, lines and conics of RP^2 / CP^2 in homogeneous coordinates, together
with incidence, cross-ratio, polarity, tangency and projective maps.  All
objects are immutable; every operation is a pure function.

Conventions
-----------
* A line ``l`` is incident to a point ``p`` iff ``l @ p == 0`` (bilinear, no
  complex conjugation).
* A conic ``C`` is the zero set of ``x @ C @ x``.  Its dual (the set of its
  tangent lines) is the zero set of ``l @ adj(C) @ l``.
* Comparisons are projective and use a relative tolerance (default 1e-10).
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    DegenerateConic,
    DegeneratePencil,
    DegenerateQuadruple,
    LineInConic,
    NotConcurrent,
    NotInPencil,
    SingularMap,
    ZeroVector,
)

DEFAULT_TOL = 1e-10
RANK_TOL = 1e-9
REAL_TOL = 1e-9
INFINITY = math.inf

ArrayLike = Union[Sequence[complex], np.ndarray]


def as_vector(values: ArrayLike) -> np.ndarray:
    """Return a length-3 array, real dtype when every imaginary part is zero."""
    arr = np.asarray(values)
    if arr.shape != (3,):
        raise ValueError(f"expected three homogeneous coordinates, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        if np.all(arr.imag == 0):
            arr = arr.real
        else:
            arr = arr.astype(complex)
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite homogeneous coordinate")
    return arr


def canonicalize(values: ArrayLike) -> np.ndarray:
    """Scale so that the largest-magnitude coordinate equals exactly 1."""
    arr = np.asarray(values)
    k = int(np.argmax(np.abs(arr)))
    if arr[k] == 0:
        raise ZeroVector("all homogeneous coordinates vanish")
    out = arr / arr[k]
    out[k] = 1.0
    return out


def real_if_close(arr: np.ndarray, tol: float = REAL_TOL) -> np.ndarray:
    """Drop imaginary parts that are below ``tol`` relative to the array norm."""
    if not np.iscomplexobj(arr):
        return arr
    scale = max(np.max(np.abs(arr)), 1e-300)
    if np.max(np.abs(arr.imag)) <= tol * scale:
        return arr.real.copy()
    return arr


def proj_distance(a: ArrayLike, b: ArrayLike) -> float:
    """Scale-free distance between two projective triples (sine of their angle).

    Uses the 2x2 minors of the pair, so it works for complex coordinates.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("zero homogeneous triple")
    minors = np.cross(a, b)
    return float(np.linalg.norm(minors) / (na * nb))


def adjugate(m: np.ndarray) -> np.ndarray:
    """Adjugate of a 3x3 matrix, computed from cross products of rows.

    Polynomial in the entries, so it stays meaningful for singular matrices.
    """
    m = np.asarray(m)
    r0, r1, r2 = m
    return np.column_stack([np.cross(r1, r2), np.cross(r2, r0), np.cross(r0, r1)])


def _skew(p: np.ndarray) -> np.ndarray:
    return np.array([[0, p[2], -p[1]], [-p[2], 0, p[0]], [p[1], -p[0], 0]], dtype=p.dtype)


def _lines_through(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two independent lines through ``p`` (equivalently two points on line ``p``)."""
    order = np.argsort(np.abs(p), kind="stable")
    e = np.eye(3)
    return np.cross(p, e[order[0]]), np.cross(p, e[order[1]])


def solve_binary_quadratic(a: complex, b: complex, c: complex,
                           snap: float = 1e-12) -> list[np.ndarray]:
    """Roots ``(s, t)`` of ``a s^2 + 2 b s t + c t^2 = 0`` as two homogeneous pairs.

    Uses the cancellation-free pairing ``(q, a)``, ``(c, q)`` with
    ``q = -(b + sqrt(b^2 - a c))`` and the root sign chosen to maximise ``|q|``.
    A discriminant below ``snap`` relative to its terms is treated as zero.
    """
    a, b, c = complex(a), complex(b), complex(c)
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0:
        raise DegenerateConic("binary quadratic vanishes identically")
    a, b, c = a / scale, b / scale, c / scale
    disc = b * b - a * c
    if abs(disc) <= snap * (abs(b) ** 2 + abs(a * c)):
        disc = 0j
    sq = cmath.sqrt(disc)
    if abs(b + sq) >= abs(b - sq):
        q = -(b + sq)
    else:
        q = -(b - sq)
    if q == 0:
        # b == 0 and a*c == 0: a double root at t == 0 or s == 0
        root = np.array([1.0, 0.0]) if abs(a) <= abs(c) else np.array([0.0, 1.0])
        return [root.astype(complex), root.astype(complex)]
    return [np.array([q, a]), np.array([c, q])]


class _Homogeneous:
    """Shared storage and projective comparison for points and lines."""

    __slots__ = ("coords",)

    def __init__(self, *values):
        if len(values) == 1:
            values = values[0]
        arr = as_vector(values)
        if not np.any(arr):
            raise ZeroVector(f"{type(self).__name__} with all-zero coordinates")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def __setattr__(self, key, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self):
        vals = ", ".join(f"{v:.6g}" for v in self.canonical())
        return f"{type(self).__name__}({vals})"

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(real_if_close(self.coords))

    def canonical(self) -> np.ndarray:
        return canonicalize(self.coords)

    def real(self):
        """Same element with negligible imaginary parts dropped."""
        return type(self)(real_if_close(self.coords))

    def equals(self, other, tol: float = DEFAULT_TOL) -> bool:
        return proj_distance(self.coords, np.asarray(other)) <= tol

    def __eq__(self, other):
        if not isinstance(other, _Homogeneous):
            return NotImplemented
        return type(self) is type(other) and self.equals(other)

    __hash__ = None

    def sort_key(self) -> tuple:
        """Lexicographic key on canonical coordinates, real part then imaginary part."""
        can = self.canonical()
        return tuple(v for z in can for v in (round(float(np.real(z)), 12),
                                               round(float(np.imag(z)), 12)))


class HomogeneousPoint(_Homogeneous):
    """Point ``[x1:x2:x3]`` of the projective plane."""

    __slots__ = ()

    @classmethod
    def from_affine(cls, x: complex, y: complex) -> "HomogeneousPoint":
        return cls((x, y, 1.0))

    @property
    def is_finite(self) -> bool:
        c = self.coords
        return abs(c[2]) > DEFAULT_TOL * np.max(np.abs(c))

    def affine(self) -> np.ndarray:
        """Coordinates in the chart ``x3 = 1``."""
        if not self.is_finite:
            raise ZeroVector("point at infinity has no affine coordinates")
        return np.asarray(self.coords[:2] / self.coords[2])

    def join(self, other: "HomogeneousPoint") -> "HomogeneousLine":
        return HomogeneousLine(np.cross(self.coords, other.coords))


class HomogeneousLine(_Homogeneous):
    """Line ``{x : a x1 + b x2 + c x3 = 0}`` with coefficients ``(a, b, c)``."""

    __slots__ = ()

    @classmethod
    def through(cls, p, q) -> "HomogeneousLine":
        return cls(np.cross(np.asarray(p), np.asarray(q)))

    @classmethod
    def from_point_direction(cls, x, v) -> "HomogeneousLine":
        """Affine line through ``x`` with direction ``v``; coefficients are ``(-v2, v1, x1 v2 - x2 v1)``."""
        r = np.array([x[0], x[1], 1.0])
        w = np.array([v[0], v[1], 0.0])
        return cls(np.cross(r, w))

    def meet(self, other: "HomogeneousLine") -> HomogeneousPoint:
        return HomogeneousPoint(np.cross(self.coords, other.coords))

    def residual(self, p) -> float:
        """Relative incidence residual ``|<l, p>| / (|l| |p|)``."""
        p = np.asarray(p)
        return float(abs(self.coords @ p) / (np.linalg.norm(self.coords) * np.linalg.norm(p)))

    def contains(self, p, tol: float = DEFAULT_TOL) -> bool:
        return self.residual(p) <= tol

    def direction(self) -> np.ndarray:
        """Affine direction vector ``(-b, a)``; complex for complex lines."""
        a, b, _ = self.coords
        return np.array([-b, a])


class Conic:
    """Conic ``{x : x^T M x = 0}`` given by a symmetric 3x3 matrix up to scale."""

    __slots__ = ("matrix", "kind")

    def __init__(self, matrix):
        m = np.array(matrix)
        if m.shape != (3, 3):
            raise ValueError("conic matrix must be 3x3")
        if np.iscomplexobj(m) and np.all(m.imag == 0):
            m = m.real
        if not np.iscomplexobj(m):
            m = m.astype(float)
        m = (m + m.T) / 2
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite conic matrix")
        s = np.linalg.svd(m, compute_uv=False)
        if s[0] == 0:
            raise ZeroVector("zero conic matrix")
        rank = int(np.sum(s > RANK_TOL * s[0]))
        kind = {3: "regular", 2: "line-pair", 1: "double-line"}[rank]
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, key, value):
        raise AttributeError("Conic is immutable")

    def __repr__(self):
        return f"Conic({self.coefficients()}, kind={self.kind!r})"

    @classmethod
    def from_coefficients(cls, a11, a12, a13, a22, a23, a33) -> "Conic":
        return cls([[a11, a12, a13], [a12, a22, a23], [a13, a23, a33]])

    @classmethod
    def circle(cls, radius: float = 1.0, center=(0.0, 0.0)) -> "Conic":
        cx, cy = center
        return cls([[1, 0, -cx], [0, 1, -cy], [-cx, -cy, cx * cx + cy * cy - radius ** 2]])

    @classmethod
    def ellipse(cls, a: float, b: float) -> "Conic":
        """Axis-aligned centred ellipse ``x^2/a^2 + y^2/b^2 = 1``."""
        return cls(np.diag([1 / a ** 2, 1 / b ** 2, -1.0]))

    @classmethod
    def through_points(cls, points: Sequence) -> "Conic":
        """Conic through five points in general position (null vector of the design matrix)."""
        rows = []
        for p in points:
            x, y, z = np.asarray(p)
            rows.append([x * x, 2 * x * y, 2 * x * z, y * y, 2 * y * z, z * z])
        _, s, vh = np.linalg.svd(np.array(rows))
        c = vh[-1].conj()
        return cls.from_coefficients(*c)

    def coefficients(self) -> tuple:
        m = self.matrix
        return (m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2], m[2, 2])

    @property
    def is_regular(self) -> bool:
        return self.kind == "regular"

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.matrix)

    def require_regular(self):
        if not self.is_regular:
            raise DegenerateConic(f"conic is {self.kind}")

    def adjugate(self) -> np.ndarray:
        return adjugate(self.matrix)

    def normalized_matrix(self) -> np.ndarray:
        return self.matrix / np.linalg.norm(self.matrix)

    def value(self, p) -> complex:
        p = np.asarray(p)
        return p @ self.matrix @ p

    def residual(self, p) -> float:
        """Relative residual ``|p^T M p| / (|M| |p|^2)``."""
        p = np.asarray(p)
        return float(abs(self.value(p)) / (np.linalg.norm(self.matrix) * (p @ p.conj()).real))

    def contains(self, p, tol: float = DEFAULT_TOL) -> bool:
        return self.residual(p) <= tol

    def tangency_residual(self, line) -> float:
        """Relative residual of ``l^T adj(M) l``: zero iff the line is tangent."""
        l = np.asarray(line)
        adj = self.adjugate()
        return float(abs(l @ adj @ l) / (np.linalg.norm(adj) * (l @ l.conj()).real))

    def equals(self, other: "Conic", tol: float = DEFAULT_TOL) -> bool:
        a = self.matrix.ravel()
        b = other.matrix.ravel()
        k = int(np.argmax(np.abs(a)))
        if b[k] == 0:
            return False
        return bool(np.linalg.norm(a / a[k] - b / b[k]) <= tol * np.linalg.norm(a / a[k]))

    def dual(self) -> "Conic":
        return dualize_conic(self)


class ProjectiveMap:
    """Invertible projective transformation given by a 3x3 matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix)
        if m.shape != (3, 3):
            raise ValueError("projective map must be 3x3")
        if not np.iscomplexobj(m):
            m = m.astype(float)
        norm = np.linalg.norm(m, 2)
        if norm == 0 or abs(np.linalg.det(m)) <= 1e-12 * norm ** 3:
            raise SingularMap("projective map is not invertible")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, key, value):
        raise AttributeError("ProjectiveMap is immutable")

    def inverse(self) -> "ProjectiveMap":
        return ProjectiveMap(np.linalg.inv(self.matrix))

    def __matmul__(self, other):
        if isinstance(other, ProjectiveMap):
            return ProjectiveMap(self.matrix @ other.matrix)
        return apply_map(self, other)

    @classmethod
    def identity(cls) -> "ProjectiveMap":
        return cls(np.eye(3))


def _coords(x) -> np.ndarray:
    return x.coords if isinstance(x, _Homogeneous) else as_vector(x)


def cross_ratio(a, b, c, d, tol: float = DEFAULT_TOL):
    """Cross-ratio ``(a, b; c, d) = [a c][b d] / ([a d][b c])``.

    Works for four collinear points or four concurrent lines; the brackets are
    2x2 determinants of coordinates in the basis ``{a, b}``.  With ``a`` at
    parameter 0 and ``b`` at infinity this reduces to ``t_c / t_d``.  Returns
    ``INFINITY`` when the denominator vanishes.
    """
    va, vb, vc, vd = (_coords(x) for x in (a, b, c, d))
    if proj_distance(va, vb) <= tol:
        raise DegenerateQuadruple("first two elements coincide")
    norms = [np.linalg.norm(v) for v in (va, vb, vc, vd)]
    for v, n in ((vc, norms[2]), (vd, norms[3])):
        res = abs(np.linalg.det(np.array([va, vb, v]))) / (norms[0] * norms[1] * n)
        if res > tol:
            raise NotInPencil(f"elements are not in one pencil (residual {res:.3g})")
    basis = np.column_stack([va / norms[0], vb / norms[1]])
    cc, *_ = np.linalg.lstsq(basis, vc / norms[2], rcond=None)
    dd, *_ = np.linalg.lstsq(basis, vd / norms[3], rcond=None)
    # basis coordinates: a = (1, 0), b = (0, 1)
    ac, ad = cc[1], dd[1]
    bd, bc = -dd[0], -cc[0]
    num = ac * bd
    den = ad * bc
    if abs(den) <= 1e-14 * max(abs(num), 1e-300) or den == 0:
        return INFINITY
    val = num / den
    if np.iscomplexobj(val) and abs(val.imag) <= REAL_TOL * max(abs(val), 1.0):
        val = val.real
    return complex(val) if np.iscomplexobj(val) else float(val)


def harmonic_conjugate(t: HomogeneousLine, n: HomogeneousLine, a: HomogeneousLine,
                       tol: float = DEFAULT_TOL) -> HomogeneousLine:
    """The line ``b`` with ``cross_ratio(t, n, a, b) == -1``.

    Writing ``a = alpha t + beta n``, the conjugate is ``alpha t - beta n``.
    """
    vt, vn, va = (_coords(x) for x in (t, n, a))
    if proj_distance(vt, vn) <= tol:
        raise DegeneratePencil("t and n coincide")
    res = abs(np.linalg.det(np.array([vt, vn, va]))) / (
        np.linalg.norm(vt) * np.linalg.norm(vn) * np.linalg.norm(va))
    if res > tol:
        raise NotConcurrent(f"lines are not concurrent (residual {res:.3g})")
    basis = np.column_stack([vt, vn])
    (alpha, beta), *_ = np.linalg.lstsq(basis, va, rcond=None)
    kind = type(a) if isinstance(a, _Homogeneous) else HomogeneousLine
    return kind(real_if_close(alpha * vt - beta * vn))


def polar_line(p: HomogeneousPoint, c: Conic) -> HomogeneousLine:
    """Polar of ``p`` with respect to a regular conic: the line ``C p``."""
    c.require_regular()
    return HomogeneousLine(c.matrix @ _coords(p))


def pole_of_line(line: HomogeneousLine, c: Conic) -> HomogeneousPoint:
    """Pole of a line with respect to a regular conic: ``adj(C) l``."""
    c.require_regular()
    return HomogeneousPoint(c.adjugate() @ _coords(line))


def tangent_lines_from_point(p: HomogeneousPoint, c: Conic) -> list[HomogeneousLine]:
    """The two (possibly complex or coincident) tangent lines from ``p`` to ``c``.

    Lines through ``p`` form the pencil ``s u + t w``; tangency ``l^T adj(C) l = 0``
    is a binary quadratic in ``(s, t)``.  Output is ordered by ``sort_key``.
    """
    c.require_regular()
    vp = _coords(p)
    u, w = _lines_through(vp)
    adj = c.adjugate()
    roots = solve_binary_quadratic(u @ adj @ u, u @ adj @ w, w @ adj @ w)
    lines = [HomogeneousLine(real_if_close(canonicalize(s * u + t * w))) for s, t in roots]
    return sorted(lines, key=lambda l: l.sort_key())


def line_conic_intersection(line: HomogeneousLine, c: Conic) -> list[HomogeneousPoint]:
    """The two (possibly complex or coincident) intersection points of a line and a conic."""
    vl = _coords(line)
    u, w = _lines_through(vl)  # points on the line
    m = c.matrix
    a, b, cc = u @ m @ u, u @ m @ w, w @ m @ w
    if max(abs(a), abs(b), abs(cc)) <= 1e-14 * np.linalg.norm(m) * np.linalg.norm(u) * np.linalg.norm(w):
        raise LineInConic("line is contained in the conic")
    roots = solve_binary_quadratic(a, b, cc)
    pts = [HomogeneousPoint(real_if_close(canonicalize(s * u + t * w))) for s, t in roots]
    return sorted(pts, key=lambda q: q.sort_key())


def orthogonal_polarity(x):
    """Orthogonal polarity of R^3: a line (2-plane) goes to its Euclidean normal and back.

    In coordinates the triple is unchanged; only its role flips.
    """
    if isinstance(x, HomogeneousLine):
        return HomogeneousPoint(x.coords)
    if isinstance(x, HomogeneousPoint):
        return HomogeneousLine(x.coords)
    if isinstance(x, Conic):
        return dualize_conic(x)
    raise TypeError(f"cannot dualize {type(x).__name__}")


def dualize_conic(c: Conic) -> Conic:
    """Dual conic (the envelope of tangent lines, read as points): matrix ``adj(C)``."""
    c.require_regular()
    return Conic(c.adjugate())


def apply_map(m: ProjectiveMap, obj):
    """Push a point, line or conic forward by a projective map."""
    a = m.matrix
    if isinstance(obj, HomogeneousPoint):
        return HomogeneousPoint(a @ obj.coords)
    inv = np.linalg.inv(a)
    if isinstance(obj, HomogeneousLine):
        return HomogeneousLine(inv.T @ obj.coords)
    if isinstance(obj, Conic):
        return Conic(inv.T @ obj.matrix @ inv)
    raise TypeError(f"cannot map {type(obj).__name__}")


def split_degenerate_conic(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a rank <= 2 symmetric matrix into two lines ``g, h`` with ``D ~ g h^T + h g^T``."""
    d = np.asarray(d, dtype=complex)
    scale = np.linalg.norm(d)
    d = d / scale
    s = np.linalg.svd(d, compute_uv=False)
    if s[1] <= RANK_TOL:
        k = int(np.argmax(np.abs(np.diag(d))))
        g = d[:, k] / cmath.sqrt(d[k, k])
        return g, g
    b = adjugate(d)
    i = int(np.argmax(np.abs(np.diag(b))))
    beta = cmath.sqrt(-b[i, i])
    p = b[:, i] / beta
    best = None
    for sign in (1.0, -1.0):
        cm = d + sign * _skew(p)
        sv = np.linalg.svd(cm, compute_uv=False)
        if best is None or sv[1] < best[0]:
            best = (sv[1], cm)
    cm = best[1]
    i, j = np.unravel_index(int(np.argmax(np.abs(cm))), cm.shape)
    return cm[:, j], cm[i, :]


def conic_intersections(c1: Conic, c2: Conic) -> list[HomogeneousPoint]:
    """The (up to four, complex) common points of two conics.

    A degenerate member of the pencil ``c1 - lam c2`` is split into two lines,
    each intersected with a regular generator.
    """
    x, y = c1.matrix, c2.matrix
    if c2.kind != "regular":
        deg, other = y, x
    elif c1.kind != "regular":
        deg, other = x, y
    else:
        coeffs = [-np.linalg.det(y), np.trace(x @ adjugate(y)), -np.trace(adjugate(x) @ y),
                  np.linalg.det(x)]
        roots = np.roots(coeffs)
        roots = sorted(roots, key=lambda r: (abs(np.imag(r)), abs(r)))
        deg, other = x - roots[0] * y, y
    other_conic = Conic(other)
    if not other_conic.is_regular:
        raise DegenerateConic("both conics are degenerate")
    g, h = split_degenerate_conic(deg)
    pts = []
    for line in (g, h):
        pts.extend(line_conic_intersection(HomogeneousLine(real_if_close(line)), other_conic))
    return sorted(pts, key=lambda q: q.sort_key())


def affine_point(p) -> np.ndarray:
    """Affine chart coordinates of a homogeneous triple or HomogeneousPoint."""
    v = _coords(p)
    return v[:2] / v[2]


def lift(x: Iterable[float]) -> np.ndarray:
    """Affine point ``(x1, x2)`` to its homogeneous representative ``(x1, x2, 1)``."""
    x1, x2 = x
    return np.array([x1, x2, 1.0])
