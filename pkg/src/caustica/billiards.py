"""Billiard tables and their dynamics.

A table is a boundary curve together with a transversal line field.  The
projective billiard reflection at a boundary point fixes the tangent direction
and negates the field direction.  Surfaces of constant curvature are modelled
as quadrics in R^3 (plane ``x3 = 1``, unit sphere, upper hyperboloid sheet)
whose geodesics are sections by 2-planes through the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import (
    CoincidentEigenlines,
    DegenerateRestriction,
    InvalidCase,
    NoIntersection,
    OffBoundary,
    OutsideDomain,
    SingularCurvePoint,
    SingularPoint,
    SingularReflection,
    ZeroVector,
)
from .projgeo import (
    Conic,
    HomogeneousLine,
    HomogeneousPoint,
    adjugate,
    real_if_close,
    solve_binary_quadratic,
)
from .reflectors import (
    LineInvolution,
    PlaneInvolution,
    SpaceInvolution,
    involution_from_directions,
    line_involution_fixing_point,
    line_involution_from_plane,
    space_involution,
)

EXCLUSION_RADIUS = 1e-7
TRANSVERSALITY_TOL = 1e-9
ON_BOUNDARY_TOL = 1e-9
EXOTIC_CASES = ("2a1", "2a2", "2b1", "2b2", "2c1", "2c2", "2d")


# --------------------------------------------------------------------------
# boundaries


class Boundary:
    """Regular parameterised curve in the affine chart ``x3 = 1``."""

    closed: bool = True
    conic: Conic | None = None
    domain: tuple[float, float] = (0.0, 2 * math.pi)

    def point(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def tangent(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def homogeneous(self, t: float) -> np.ndarray:
        x = self.point(t)
        return np.array([x[0], x[1], 1.0])

    def tangent_line(self, t: float) -> HomogeneousLine:
        return HomogeneousLine.from_point_direction(self.point(t), self.tangent(t))

    def parameter_of(self, x) -> float:
        raise NotImplementedError

    def wrap(self, t: float) -> float:
        if self.closed:
            lo, hi = self.domain
            return lo + (t - lo) % (hi - lo)
        return t

    def parameter_distance(self, s: float, t: float) -> float:
        if self.closed:
            period = self.domain[1] - self.domain[0]
            d = abs(s - t) % period
            return min(d, period - d)
        return abs(s - t)


class ConicBoundary(Boundary):
    """Real regular ellipse or parabola with an explicit chart.

    Ellipses use ``center + axes @ (cos t, sin t)``; parabolas use
    ``origin + t f + u(t) e`` with ``u`` quadratic.  The conic matrix is
    sign-normalised so that the table interior is where ``x^T C x < 0``.
    """

    def __init__(self, conic: Conic, window: tuple[float, float] = (-3.0, 3.0)):
        conic.require_regular()
        if not conic.is_real:
            raise ValueError("table boundary must be a real conic")
        m = np.array(conic.matrix, dtype=float)
        block = m[:2, :2]
        det2 = np.linalg.det(block)
        scale = np.linalg.norm(block)
        if det2 > 1e-12 * scale ** 2:
            self.kind = "ellipse"
            self.closed = True
            self.domain = (0.0, 2 * math.pi)
            center = np.linalg.solve(block, -m[:2, 2])
            r = np.array([center[0], center[1], 1.0])
            value = r @ m @ r
            if value > 0:
                m = -m
                block = -block
                value = -value
            if np.any(np.linalg.eigvalsh(block) <= 0):
                raise ValueError("conic is an imaginary ellipse")
            w, vecs = np.linalg.eigh(block)
            self.center = center
            self.axes = vecs @ np.diag(np.sqrt(-value / w))
        elif abs(det2) <= 1e-12 * scale ** 2:
            self.kind = "parabola"
            self.closed = False
            self.domain = (-math.inf, math.inf)
            w, vecs = np.linalg.eigh(block)
            k = int(np.argmax(np.abs(w)))
            f = vecs[:, k]
            e = vecs[:, 1 - k]
            mu = w[k]
            lin = m[:2, 2]
            # x = s f + u e:  mu s^2 + 2 (lin.f) s + 2 (lin.e) u + m33 = 0
            le = lin @ e
            if abs(le) <= 1e-14 * scale:
                raise ValueError("degenerate parabola")
            self._f, self._e = f, e
            self._coef = (-mu / (2 * le), -(lin @ f) / le, -m[2, 2] / (2 * le))
            # interior contains the focus side: step along +u from the vertex region
            probe = self._chart(0.0) + e * np.sign(self._coef[0])
            pr = np.array([probe[0], probe[1], 1.0])
            if pr @ m @ pr > 0:
                m = -m
        else:
            raise ValueError("hyperbolic boundaries are not supported")
        self.conic = Conic(m)
        self.window = window

    def _chart(self, t: float) -> np.ndarray:
        a, b, c = self._coef
        return t * self._f + (a * t * t + b * t + c) * self._e

    @classmethod
    def ellipse(cls, a: float, b: float) -> "ConicBoundary":
        return cls(Conic.ellipse(a, b))

    @classmethod
    def circle(cls, radius: float = 1.0, center=(0.0, 0.0)) -> "ConicBoundary":
        return cls(Conic.circle(radius, center))

    @classmethod
    def parabola(cls, window: tuple[float, float] = (-3.0, 3.0)) -> "ConicBoundary":
        """The standard parabola ``x2 = x1^2``, parameterised by ``t = x1``."""
        return cls(Conic.from_coefficients(1, 0, 0, 0, -0.5, 0), window)

    @property
    def sample_domain(self) -> tuple[float, float]:
        return self.domain if self.closed else self.window

    def point(self, t: float) -> np.ndarray:
        if self.kind == "ellipse":
            return self.center + self.axes @ np.array([math.cos(t), math.sin(t)])
        return self._chart(t)

    def tangent(self, t: float) -> np.ndarray:
        if self.kind == "ellipse":
            return self.axes @ np.array([-math.sin(t), math.cos(t)])
        a, b, _ = self._coef
        return self._f + (2 * a * t + b) * self._e

    def parameter_of(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if self.kind == "ellipse":
            c = np.linalg.solve(self.axes, x - self.center)
            return math.atan2(c[1], c[0]) % (2 * math.pi)
        return float(x @ self._f)

    def is_standard_parabola(self) -> bool:
        if self.kind != "parabola":
            return False
        ref = Conic.from_coefficients(1, 0, 0, 0, -0.5, 0)
        return self.conic.equals(ref, 1e-12)

    def on_boundary_residual(self, x) -> float:
        r = np.array([x[0], x[1], 1.0])
        return self.conic.residual(r)


class ImplicitCurve(Boundary):
    """Star-shaped oval ``{F(x, y) = 0}`` of a real polynomial of degree <= 6.

    ``coeffs`` maps exponent pairs ``(i, j)`` to the coefficient of ``x^i y^j``.
    Points are found by Newton refinement along rays from ``center``, so the
    parameter is the polar angle and an arc is an angular box.
    """

    def __init__(self, coeffs: dict, center=(0.0, 0.0), arc: tuple[float, float] = (0.0, 2 * math.pi)):
        if not coeffs:
            raise ValueError("empty polynomial")
        degree = max(i + j for i, j in coeffs)
        if degree > 6:
            raise ValueError("implicit curves are limited to degree 6")
        self.coeffs = {tuple(k): float(v) for k, v in coeffs.items()}
        self.degree = degree
        self.center = np.asarray(center, dtype=float)
        self.domain = (float(arc[0]), float(arc[1]))
        self.closed = math.isclose(arc[1] - arc[0], 2 * math.pi)
        self.sample_domain = self.domain
        if self.value(self.center) >= 0:
            raise ValueError("center must lie strictly inside the oval (F < 0)")

    def value(self, p) -> float:
        x, y = p
        return sum(c * x ** i * y ** j for (i, j), c in self.coeffs.items())

    def gradient(self, p) -> np.ndarray:
        x, y = p
        gx = sum(c * i * x ** (i - 1) * y ** j for (i, j), c in self.coeffs.items() if i)
        gy = sum(c * j * x ** i * y ** (j - 1) for (i, j), c in self.coeffs.items() if j)
        return np.array([gx, gy])

    def point(self, t: float) -> np.ndarray:
        u = np.array([math.cos(t), math.sin(t)])
        g = lambda s: self.value(self.center + s * u)
        hi = 1.0
        while g(hi) <= 0:
            hi *= 2
            if hi > 1e8:
                raise SingularCurvePoint("ray does not leave the oval")
        s = brentq(g, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        for _ in range(2):
            p = self.center + s * u
            dg = self.gradient(p) @ u
            if dg == 0:
                break
            s -= g(s) / dg
        p = self.center + s * u
        if np.linalg.norm(self.gradient(p)) <= 1e-10:
            raise SingularCurvePoint(f"vanishing gradient at {p}")
        return p

    def tangent(self, t: float) -> np.ndarray:
        gx, gy = self.gradient(self.point(t))
        return np.array([-gy, gx])

    def parameter_of(self, x) -> float:
        d = np.asarray(x, dtype=float) - self.center
        return math.atan2(d[1], d[0]) % (2 * math.pi)

    def on_boundary_residual(self, x) -> float:
        g = self.gradient(x)
        return abs(self.value(x)) / max(np.linalg.norm(g), 1e-300)


# --------------------------------------------------------------------------
# transversal fields


def _exotic_vector_field(case: str, n: int | None) -> Callable:
    if case in ("2a1", "2a2"):
        if n is None or n < 1:
            raise InvalidCase(f"case {case} needs an integer N >= 1")
        rho = 2 - 2 / (2 * n + 1) if case == "2a1" else 2 - 1 / (n + 1)
        return lambda x1, x2: (rho + 0 * x1, 2 * (rho - 2) * x1)
    table = {
        "2b1": lambda x1, x2: (5 * x1 + 3, 2 * (x2 - x1)),
        "2b2": lambda x1, x2: (3 * x1, 2 * x2 - 4),
        "2c1": lambda x1, x2: (x2, x1 * x2 - 1),
        "2c2": lambda x1, x2: (2 * x1 + 1, x2 - x1),
        "2d": lambda x1, x2: (7 * x1 + 4, 2 * x2 - 4 * x1),
    }
    if case not in table:
        raise InvalidCase(f"unknown exotic case {case!r}")
    return table[case]


def exotic_rho(case: str, n: int) -> float:
    if case == "2a1":
        return 2 - 2 / (2 * n + 1)
    if case == "2a2":
        return 2 - 1 / (n + 1)
    raise InvalidCase(f"case {case!r} has no rho parameter")


@dataclass(frozen=True)
class TransversalField:
    """Projective billiard structure on a boundary.

    kind:
      ``normal``       Euclidean normal lines.
      ``dual-pencil``  line through ``x`` and the pole of the tangent line with
                       respect to a companion conic; ``matrix`` stores the
                       companion's dual (line-conic) matrix, which may be
                       degenerate.
      ``a-orthogonal`` line through ``x`` and the form-normal of the tangent
                       2-plane; ``matrix`` is the form.
      ``central``      lines through the point ``matrix`` (homogeneous).
      ``exotic``       one of the seven rigid fields on ``x2 = x1^2``.
    """

    kind: str
    matrix: np.ndarray | None = None
    case: str | None = None
    N: int | None = None

    @classmethod
    def normal(cls) -> "TransversalField":
        return cls("normal")

    @classmethod
    def dual_pencil(cls, companion: Conic) -> "TransversalField":
        companion.require_regular()
        return cls("dual-pencil", np.array(companion.adjugate()))

    @classmethod
    def dual_pencil_from_dual(cls, dual_matrix) -> "TransversalField":
        return cls("dual-pencil", np.array(dual_matrix, dtype=float))

    @classmethod
    def a_orthogonal(cls, form) -> "TransversalField":
        return cls("a-orthogonal", np.array(form, dtype=float))

    @classmethod
    def central(cls, center) -> "TransversalField":
        c = np.asarray(center, dtype=float)
        if c.shape == (2,):
            c = np.array([c[0], c[1], 1.0])
        return cls("central", c)

    @classmethod
    def exotic(cls, case: str, N: int | None = None) -> "TransversalField":
        _exotic_vector_field(case, N)
        return cls("exotic", None, case, N if case in ("2a1", "2a2") else None)

    @property
    def label(self) -> str:
        if self.kind == "exotic":
            return self.case + (f"(N={self.N})" if self.N else "")
        return self.kind

    def invariant_dual_conic(self) -> np.ndarray | None:
        """M-side conic whose points on ``L_P`` the dual involution swaps, when known in closed form."""
        if self.kind == "normal":
            return np.diag([1.0, 1.0, 0.0])
        if self.kind == "dual-pencil":
            return self.matrix
        if self.kind == "a-orthogonal":
            return adjugate(self.matrix)
        return None

    def field_point(self, x, tangent) -> np.ndarray:
        """A point (homogeneous, possibly at infinity) on the field line through ``x``."""
        x = np.asarray(x)
        t = np.asarray(tangent)
        r = np.array([x[0], x[1], 1.0], dtype=np.result_type(x, float))
        if self.kind == "normal":
            return np.array([-t[1], t[0], 0.0])
        if self.kind == "exotic":
            d1, d2 = _exotic_vector_field(self.case, self.N)(x[0], x[1])
            return np.array([d1, d2, 0.0])
        if self.kind == "central":
            return self.matrix
        ell = np.cross(r, np.array([t[0], t[1], 0.0]))
        if self.kind == "dual-pencil":
            return self.matrix @ ell
        if self.kind == "a-orthogonal":
            a = self.matrix
            return np.cross(a @ r, a @ np.array([t[0], t[1], 0.0]))
        raise ValueError(f"unknown field kind {self.kind!r}")

    def direction(self, x, tangent) -> np.ndarray:
        """Affine direction of the field line at ``x``; zero if the field point is ``x`` itself."""
        p = self.field_point(x, tangent)
        x = np.asarray(x)
        return p[:2] - p[2] * x


@dataclass
class Table:
    """Boundary plus transversal field, with the singular parameters cached."""

    boundary: Boundary
    field: TransversalField
    excluded: tuple = field(default=None)

    def __post_init__(self):
        if self.field.kind == "exotic" and not (
                isinstance(self.boundary, ConicBoundary) and self.boundary.is_standard_parabola()):
            raise InvalidCase("exotic fields live on the parabola x2 = x1^2")
        if self.excluded is None:
            self.excluded = tuple(excluded_parameters(self.boundary, self.field))

    def transversality(self, t: float) -> float:
        """Signed sine of the angle between tangent and field direction."""
        x = self.boundary.point(t)
        tan = self.boundary.tangent(t)
        d = self.field.direction(x, tan)
        nd = np.linalg.norm(d)
        if nd == 0:
            return 0.0
        return float((tan[0] * d[1] - tan[1] * d[0]) / (np.linalg.norm(tan) * nd))

    def check_regular(self, t: float, radius: float = EXCLUSION_RADIUS):
        for s in self.excluded:
            if self.boundary.parameter_distance(s, t) < radius:
                raise SingularPoint(f"parameter {t} is within {radius} of singular parameter {s}")
        if abs(self.transversality(t)) < TRANSVERSALITY_TOL:
            raise SingularPoint(f"field is tangent to the boundary at parameter {t}")

    def field_line(self, t: float) -> HomogeneousLine:
        self.check_regular(t)
        x = self.boundary.point(t)
        d = self.field.direction(x, self.boundary.tangent(t))
        return HomogeneousLine.from_point_direction(x, d)

    def involution(self, t: float) -> PlaneInvolution:
        self.check_regular(t)
        x = self.boundary.point(t)
        tan = self.boundary.tangent(t)
        return involution_from_directions(tan, self.field.direction(x, tan), x)

    def reflect(self, t: float, v) -> np.ndarray:
        return self.involution(t)(v)


def excluded_parameters(boundary: Boundary, fld: TransversalField, grid: int = 4096,
                        near: float | None = None, width: float = 1e-3) -> list[float]:
    """Real parameters where the field is tangent to the boundary.

    With ``near`` only the window ``near +- width`` is scanned.
    """
    if fld.kind == "exotic":
        pts = exotic_tangency_locus(fld.case, fld.N)
        out = []
        for p in pts:
            c = p.coords
            if abs(c[2]) > 1e-12 and abs(np.imag(c[0] / c[2])) < 1e-12:
                out.append(float(np.real(c[0] / c[2])))
        return sorted(out)
    if fld.kind == "normal":
        return []
    if near is not None:
        lo, hi, grid = near - width, near + width, 64
    else:
        lo, hi = boundary.sample_domain
        if not boundary.closed:
            span = hi - lo
            lo, hi = lo - 10 * span, hi + 10 * span

    def g(t):
        x = boundary.point(t)
        tan = boundary.tangent(t)
        d = fld.direction(x, tan)
        return tan[0] * d[1] - tan[1] * d[0]

    ts = np.linspace(lo, hi, grid + 1)
    vals = np.array([g(t) for t in ts])
    scale = max(np.max(np.abs(vals)), 1e-300)
    roots = []
    for k in range(grid):
        a, b = vals[k], vals[k + 1]
        if a == 0:
            roots.append(ts[k])
        elif a * b < 0:
            roots.append(brentq(g, ts[k], ts[k + 1], xtol=1e-15))
        elif 0 < k and abs(a) < 1e-6 * scale and abs(a) <= abs(vals[k - 1]) and abs(a) <= abs(b):
            roots.append(ts[k])  # touching zero without a sign change
    out = []
    for r in roots:
        r = boundary.wrap(float(r))
        if all(boundary.parameter_distance(r, s) > 1e-9 for s in out):
            out.append(r)
    return sorted(out)


def transversal_field_eval(boundary: Boundary, fld: TransversalField, x) -> HomogeneousLine:
    """Field line at the boundary point ``x``."""
    x = np.asarray(x, dtype=float)
    if boundary.on_boundary_residual(x) > ON_BOUNDARY_TOL:
        raise OffBoundary(f"{x} is not on the boundary")
    t = boundary.parameter_of(x)
    table = Table(boundary, fld, tuple(excluded_parameters(boundary, fld, near=t)))
    return table.field_line(t)


def exotic_tangency_locus(case: str, N: int | None = None) -> list[HomogeneousPoint]:
    """Points of the complex parabola where the exotic field is tangent to it.

    Finite points solve ``d2 - 2 x1 d1 = 0`` on ``x2 = x1^2``; the infinite
    point ``E = [0:1:0]`` is included when the limiting field line there is the
    line at infinity (the parabola's tangent at ``E``).
    """
    vf = _exotic_vector_field(case, N)
    P = np.polynomial.Polynomial
    t = P([0.0, 1.0])
    d1, d2 = vf(t, t * t)
    d1 = d1 if isinstance(d1, P) else P([d1])
    d2 = d2 if isinstance(d2, P) else P([d2])
    cond = (d2 - 2 * t * d1).trim()
    pts = []
    if cond.degree() > 0:
        for root in cond.roots():
            root = complex(root)
            if abs(root.imag) < 1e-13:
                root = complex(root.real, 0.0)
            pts.append(HomogeneousPoint(real_if_close(np.array([root, root * root, 1.0]))))
    pts.sort(key=lambda p: p.sort_key())
    # field line r x (d, 0) = (-d2, d1, t d2 - t^2 d1); inspect its leading term
    comps = [(-d2).trim(), d1.trim(), (t * d2 - t * t * d1).trim()]
    deg = max(c.degree() for c in comps)
    lead = np.array([c.coef[deg] if c.degree() == deg else 0.0 for c in comps])
    if abs(lead[0]) < 1e-14 and abs(lead[1]) < 1e-14:
        pts.append(HomogeneousPoint((0.0, 1.0, 0.0)))
    return pts


# --------------------------------------------------------------------------
# planar dynamics


@dataclass(frozen=True)
class PhaseState:
    """Oriented line: a base point and a direction along it."""

    point: np.ndarray
    direction: np.ndarray
    parameter: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "direction", np.asarray(self.direction, dtype=float))
        if not np.any(self.direction):
            raise ZeroVector("phase state needs a nonzero direction")

    @property
    def line(self) -> HomogeneousLine:
        return HomogeneousLine.from_point_direction(self.point, self.direction)


def ray_conic_parameters(conic: Conic, x, v) -> list[float]:
    """Real ``s`` with ``x + s v`` on the conic, ascending."""
    m = conic.matrix
    r = np.array([x[0], x[1], 1.0])
    w = np.array([v[0], v[1], 0.0])
    a, b, c = w @ m @ w, w @ m @ r, r @ m @ r
    if max(abs(a), abs(b)) == 0:
        return []
    out = []
    for s, u in solve_binary_quadratic(a, b, c):
        if abs(u) == 0:
            continue
        val = s / u
        if abs(val.imag) <= 1e-9 * max(1.0, abs(val)):
            out.append(float(val.real))
    return sorted(out)


def billiard_step(boundary: ConicBoundary, fld: TransversalField | Table, state: PhaseState) -> PhaseState:
    """Fly along the oriented line to the next boundary hit and reflect there."""
    table = fld if isinstance(fld, Table) else Table(boundary, fld)
    x, v = state.point, state.direction
    scale = np.linalg.norm(v) * max(1.0, np.linalg.norm(x))
    ahead = [s for s in ray_conic_parameters(boundary.conic, x, v) if s > 1e-9 * scale / np.linalg.norm(v) ** 2]
    if not ahead:
        raise NoIntersection("orbit escapes")
    s = ahead[-1]
    hit = x + s * v
    t = boundary.parameter_of(hit)
    hit = boundary.point(t)
    try:
        inv = table.involution(t)
    except (SingularPoint, CoincidentEigenlines) as exc:
        raise SingularReflection(str(exc)) from exc
    out = inv(v)
    h = np.array([hit[0], hit[1], 1.0])
    w = np.array([out[0], out[1], 0.0])
    if w @ boundary.conic.matrix @ h > 0:
        out = -out  # point into the table
    return PhaseState(hit, out, t)


def orbit(boundary: ConicBoundary, fld: TransversalField | Table, state: PhaseState,
          n_bounces: int) -> list[PhaseState]:
    """Initial state followed by up to ``n_bounces`` reflections; stops early on escape."""
    table = fld if isinstance(fld, Table) else Table(boundary, fld)
    states = [state]
    for _ in range(n_bounces):
        try:
            state = billiard_step(boundary, table, state)
        except NoIntersection:
            break
        states.append(state)
    return states


# --------------------------------------------------------------------------
# constant-curvature surfaces


@dataclass(frozen=True)
class SurfaceModel:
    """Surface ``Sigma`` in R^3 with its quadratic form ``A``."""

    tag: str
    form: np.ndarray

    @classmethod
    def plane(cls) -> "SurfaceModel":
        return cls("plane", np.diag([1.0, 1.0, 0.0]))

    @classmethod
    def sphere(cls) -> "SurfaceModel":
        return cls("sphere", np.eye(3))

    @classmethod
    def hyperbolic(cls) -> "SurfaceModel":
        return cls("hyperbolic", np.diag([1.0, 1.0, -1.0]))

    @classmethod
    def from_tag(cls, tag: str) -> "SurfaceModel":
        return {"plane": cls.plane, "sphere": cls.sphere, "hyperbolic": cls.hyperbolic}[tag]()

    @property
    def absolute(self) -> Conic:
        """Isotropic conic ``<A x, x> = 0`` of the model."""
        return Conic(self.form)

    def surface_residual(self, X) -> float:
        X = np.asarray(X, dtype=float)
        if self.tag == "plane":
            return abs(X[2] - 1.0)
        target = 1.0 if self.tag == "sphere" else -1.0
        return abs(X @ self.form @ X - target)

    def tangent_projection(self, X, V) -> np.ndarray:
        """Component of ``V`` tangent to the surface at ``X``, staying in span{X, V}."""
        X = np.asarray(X, dtype=float)
        V = np.asarray(V, dtype=float)
        if self.tag == "plane":
            return V - V[2] * X
        a = self.form
        return V - (V @ a @ X) / (X @ a @ X) * X

    def reflection(self, X, ell) -> SpaceInvolution:
        """Reflection at ``X`` in the geodesic plane with covector ``ell`` (a plane through ``X``)."""
        X = np.asarray(X, dtype=float)
        ell = np.asarray(ell, dtype=float)
        if self.tag == "plane":
            n = np.array([ell[0], ell[1], 0.0])
            ln = ell @ n
            if ln == 0:
                raise DegenerateRestriction("boundary tangent is the line at infinity")
            return SpaceInvolution(np.eye(3) - 2 * np.outer(n, ell) / ln, self.form)
        tan = np.cross(ell, self.form @ X)
        if np.linalg.norm(tan) == 0:
            raise DegenerateRestriction("tangent direction undefined")
        return space_involution(self.form, X, tan)


def lift_to_surface(model: SurfaceModel, p) -> np.ndarray:
    """Representative of the projective point ``p`` on the surface."""
    v = np.asarray(p.coords if isinstance(p, HomogeneousPoint) else p)
    v = np.asarray(real_if_close(np.asarray(v)), dtype=float)
    if model.tag == "plane":
        if abs(v[2]) <= 1e-14 * np.linalg.norm(v):
            raise OutsideDomain("point at infinity has no planar lift")
        return v / v[2]
    if model.tag == "sphere":
        X = v / np.linalg.norm(v)
        k = next(i for i in (2, 1, 0) if abs(X[i]) > 1e-15)
        return X if X[k] > 0 else -X
    q = v @ model.form @ v
    if q >= -1e-14 * (v @ v):
        raise OutsideDomain("point is not inside the absolute")
    X = v / math.sqrt(-q)
    return X if X[2] > 0 else -X


def project_pi(X) -> HomogeneousPoint:
    """Tautological projection ``R^3 \\ {0} -> RP^2``."""
    return HomogeneousPoint(np.asarray(X, dtype=float))


@dataclass(frozen=True)
class SurfaceState:
    point: np.ndarray
    velocity: np.ndarray


def _geodesic(model: SurfaceModel, X, V):
    """Position and velocity along the unit-speed geodesic through ``X`` with direction ``V``."""
    a = model.form
    if model.tag == "plane":
        speed = math.sqrt(V @ a @ V)
        U = V / speed
        return (lambda s: X + s * U), (lambda s: U)
    speed = math.sqrt(V @ a @ V)
    U = V / speed
    if model.tag == "sphere":
        return (lambda s: X * math.cos(s) + U * math.sin(s)), (lambda s: -X * math.sin(s) + U * math.cos(s))
    return (lambda s: X * math.cosh(s) + U * math.sinh(s)), (lambda s: X * math.sinh(s) + U * math.cosh(s))


def surface_billiard_step(model: SurfaceModel, conic: Conic, state: SurfaceState) -> SurfaceState:
    """Move along the geodesic to the next hit of the cone of ``conic`` and reflect there."""
    X = np.asarray(state.point, dtype=float)
    V = model.tangent_projection(X, state.velocity)
    a_form = model.form
    speed = math.sqrt(V @ a_form @ V)
    U = V / speed
    m = conic.matrix
    # Y = c X + s U  ->  binary quadratic in (c, s)
    roots = solve_binary_quadratic(X @ m @ X, X @ m @ U, U @ m @ U)
    candidates = []
    for c, s in roots:
        if abs(np.imag(c)) > 1e-9 * abs(c) + 1e-300 or abs(np.imag(s)) > 1e-9 * abs(s) + 1e-300:
            continue
        c, s = float(np.real(c)), float(np.real(s))
        if model.tag == "plane":
            if c != 0:
                candidates.append(s / c)
        elif model.tag == "sphere":
            th = math.atan2(s, c)
            candidates.extend([th % (2 * math.pi), (th + math.pi) % (2 * math.pi)])
        else:
            if abs(s) < abs(c):
                candidates.append(math.atanh(s / c))
    eps = 1e-9
    ahead = sorted(s for s in candidates if s > eps)
    if not ahead:
        raise NoIntersection("geodesic does not meet the boundary")
    s = ahead[0]
    pos, vel = _geodesic(model, X, V)
    Y = pos(s)
    if model.tag != "plane":
        Y = Y / math.sqrt(abs(Y @ a_form @ Y))
    W = model.tangent_projection(Y, vel(s) * speed)
    ell = m @ Y
    J = model.reflection(Y, ell)
    return SurfaceState(Y, J(W))


# --------------------------------------------------------------------------
# duality


@dataclass
class DualBilliard:
    """Dual billiard on ``gamma = C*`` obtained by orthogonal polarity.

    The point ``P`` dual to the tangent line at boundary parameter ``t`` has
    tangent line ``L_P = Q*`` whose coefficients are ``(x1, x2, 1)``.
    """

    table: Table
    gamma: Conic | None

    def point(self, t: float) -> HomogeneousPoint:
        return HomogeneousPoint(self.table.boundary.tangent_line(t).coords)

    def tangent_line(self, t: float) -> HomogeneousLine:
        return HomogeneousLine(self.table.boundary.homogeneous(t))

    def involution(self, t: float, method: str = "auto") -> LineInvolution:
        """``sigma_P`` at the parameter ``t``.

        ``conjugate`` transports the planar reflection through the polarity;
        ``invariant`` builds the involution fixing ``P`` and swapping ``L_P``
        with the field's invariant dual conic (the absolute for Euclidean
        tables, the companion's dual for dual-pencil tables).
        """
        inv_conic = self.table.field.invariant_dual_conic()
        if method == "auto":
            method = "invariant" if inv_conic is not None else "conjugate"
        if method == "conjugate":
            return line_involution_from_plane(self.table.involution(t))
        if inv_conic is None:
            raise ValueError("field has no closed-form invariant dual conic")
        self.table.check_regular(t)
        return line_involution_fixing_point(self.point(t), self.tangent_line(t), Conic(inv_conic))


def dualize_billiard(boundary: Boundary, fld: TransversalField) -> DualBilliard:
    table = Table(boundary, fld)
    gamma = None
    if boundary.conic is not None:
        gamma = Conic(boundary.conic.adjugate())
    return DualBilliard(table, gamma)
