import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caustica.billiards import (
    ConicBoundary,
    DualBilliard,
    PhaseState,
    SurfaceModel,
    SurfaceState,
    Table,
    TransversalField,
    billiard_step,
    dualize_billiard,
    exotic_tangency_locus,
    lift_to_surface,
    orbit,
    project_pi,
    surface_billiard_step,
    transversal_field_eval,
)
from caustica.caustics import ConfocalPencil
from caustica.errors import NoIntersection, OutsideDomain, SingularPoint, SingularReflection
from caustica.projgeo import Conic, HomogeneousLine, HomogeneousPoint, proj_distance


def chord_distance(state):
    x, v = state.point, state.direction
    return abs(x[0] * v[1] - x[1] * v[0]) / np.linalg.norm(v)


def dual_residual(conic, state):
    line = state.line.coords
    return conic.tangency_residual(HomogeneousLine(line))


class TestBoundaries:
    @pytest.mark.parametrize("boundary", [
        ConicBoundary.ellipse(2, 1), ConicBoundary.circle(1.5, (0.3, -0.2)), ConicBoundary.parabola(),
        ConicBoundary(Conic.from_coefficients(2, 0.3, 0.1, 1, -0.2, -1)),
    ])
    def test_chart_lies_on_conic(self, boundary):
        lo, hi = boundary.sample_domain
        for t in np.linspace(lo, hi, 97):
            assert boundary.on_boundary_residual(boundary.point(t)) < 1e-12
            assert np.linalg.norm(boundary.tangent(t)) > 1e-6
            assert boundary.parameter_distance(boundary.parameter_of(boundary.point(t)), t) < 1e-9

    def test_parabola_chart_is_rational(self):
        b = ConicBoundary.parabola()
        assert b.is_standard_parabola
        assert b.point(1.5) == pytest.approx([1.5, 2.25])


class TestFieldEvaluation:
    def test_concentric_pencil_is_normal(self):
        boundary = ConicBoundary.circle()
        for r in (0.3, 0.5, 2.0):
            line = transversal_field_eval(boundary, TransversalField.dual_pencil(Conic.circle(r)), [1.0, 0.0])
            assert line == HomogeneousLine((0, 1, 0))

    def test_normal_field(self):
        boundary = ConicBoundary.ellipse(2, 1)
        x = boundary.point(0.7)
        line = transversal_field_eval(boundary, TransversalField.normal(), x)
        d = line.direction()
        assert abs(np.real(d) @ boundary.tangent(0.7)) < 1e-12
        assert line.residual(np.append(x, 1.0)) < 1e-12

    def test_case_2a1_direction(self):
        # rho = 4/3 for N = 1: (rho, 2(rho - 2) x1) at x = (1, 1)
        d = TransversalField.exotic("2a1", 1).direction([1.0, 1.0], [1.0, 2.0])
        assert proj_distance(np.append(d, 0), [1, -1, 0]) < 1e-12

    def test_case_2b2_direction(self):
        d = TransversalField.exotic("2b2").direction([2.0, 4.0], [1.0, 4.0])
        assert d == pytest.approx([6.0, 4.0])

    def test_excluded_point_rejected(self):
        table = Table(ConicBoundary.parabola(), TransversalField.exotic("2b1"))
        with pytest.raises(SingularPoint):
            table.check_regular(0.0)

    @given(st.floats(0.05, 0.9), st.floats(0, 2 * math.pi))
    @settings(max_examples=50, deadline=None)
    def test_dual_pencil_member_independence(self, lam, t):
        # S and any other non-C member of the dual pencil spanned by C* and S* give the same field
        boundary = ConicBoundary.ellipse(2, 1)
        s_dual = np.diag([1.0, 1.0, -0.3])
        c_dual = boundary.conic.adjugate()
        other = (1 - lam) * s_dual + lam * c_dual / np.max(np.abs(c_dual))
        f1 = TransversalField.dual_pencil_from_dual(s_dual)
        f2 = TransversalField.dual_pencil_from_dual(other)
        x = boundary.point(t)
        l1 = transversal_field_eval(boundary, f1, x)
        l2 = transversal_field_eval(boundary, f2, x)
        assert proj_distance(l1.coords, l2.coords) < 1e-9


class TestTangencyLocus:
    def test_case_2a(self):
        for case in ("2a1", "2a2"):
            pts = exotic_tangency_locus(case, 2)
            assert len(pts) == 2
            assert pts[0] == HomogeneousPoint((0, 0, 1))
            assert pts[1] == HomogeneousPoint((0, 1, 0))

    def test_case_2b2(self):
        pts = exotic_tangency_locus("2b2")
        finite = [p.affine() for p in pts if abs(p.coords[2]) > 0]
        assert len(finite) == 2 and pts[-1] == HomogeneousPoint((0, 1, 0))
        for x1, x2 in finite:
            assert abs(4 * x1 ** 2 + 4) < 1e-10
            assert abs(x2 + 1) < 1e-10
        assert sorted(x1.imag for x1, _ in finite) == pytest.approx([-1, 1])

    def test_case_2c1_cube_roots(self):
        pts = exotic_tangency_locus("2c1")
        assert len(pts) == 3  # the field line at E is not the line at infinity
        expected = [(-cmath.exp(2j * math.pi * j / 3), cmath.exp(4j * math.pi * j / 3)) for j in range(3)]
        for x1, x2 in (p.affine() for p in pts):
            assert abs(x1 ** 3 + 1) < 1e-10
            assert abs(x1 * x2 + 1) < 1e-10
            assert min(abs(x1 - a) + abs(x2 - b) for a, b in expected) < 1e-10


class TestPlanarDynamics:
    @given(st.floats(0.05, 0.95), st.floats(0, 2 * math.pi))
    @settings(max_examples=40, deadline=None)
    def test_circle_conserves_chord_distance(self, d, phi):
        boundary = ConicBoundary.circle()
        start = PhaseState([0.0, -d], [1.0, 0.0])
        rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
        start = PhaseState(rot @ start.point, rot @ start.direction)
        states = orbit(boundary, TransversalField.normal(), start, 30)
        assert len(states) == 31
        for s in states:
            assert chord_distance(s) == pytest.approx(d, abs=1e-10)

    def test_circle_angle_of_incidence(self):
        boundary = ConicBoundary.circle()
        s0 = PhaseState([0.0, -0.6], [1.0, 0.0])
        s1 = billiard_step(boundary, TransversalField.normal(), s0)
        tang = boundary.tangent(s1.parameter)
        cos_in = abs(s0.direction @ tang) / np.linalg.norm(s0.direction) / np.linalg.norm(tang)
        cos_out = abs(s1.direction @ tang) / np.linalg.norm(s1.direction) / np.linalg.norm(tang)
        assert cos_in == pytest.approx(cos_out, abs=1e-12)
        assert s1.point == pytest.approx([0.8, -0.6])

    def test_ellipse_confocal_tangency(self):
        boundary = ConicBoundary.ellipse(2, 1)
        caustic = ConfocalPencil.euclidean(2, 1).member(0.5)
        # horizontal chord tangent to x^2/3.5 + y^2/0.5 = 1 at the bottom
        state = PhaseState([0.0, -math.sqrt(0.5)], [1.0, 0.0])
        assert dual_residual(caustic, state) < 1e-12
        for s in orbit(boundary, TransversalField.normal(), state, 50)[1:]:
            assert dual_residual(caustic, s) < 1e-9

    def test_closed_orbit_stays_on_phase_cylinder(self):
        boundary = ConicBoundary.ellipse(2, 1)
        table = Table(boundary, TransversalField.dual_pencil(Conic.ellipse(0.7, 0.4)))
        states = orbit(boundary, table, PhaseState([0.1, 0.2], [0.3, 1.0]), 40)
        assert len(states) == 41
        for s in states[1:]:
            assert boundary.on_boundary_residual(s.point) < 1e-12

    def test_parabola_orbit_is_finite(self):
        # every non-vertical chord re-enters the epigraph, so orbits are cut at n_bounces
        boundary = ConicBoundary.parabola()
        state = PhaseState([0.3, 3.0], [0.4, -1.0])
        states = orbit(boundary, TransversalField.exotic("2b2"), state, 60)
        assert len(states) == 61
        for s in states[1:]:
            assert boundary.on_boundary_residual(s.point) < 1e-9 * max(1.0, s.point[1])

    def test_parabola_orbit_stops_on_escape(self):
        # a ray parallel to the axis leaves through E and ends the orbit
        boundary = ConicBoundary.parabola()
        states = orbit(boundary, TransversalField.exotic("2b2"), PhaseState([0.5, 3.0], [0.0, 1.0]), 10)
        assert len(states) == 1

    def test_escape_outside_parabola(self):
        with pytest.raises(NoIntersection):
            billiard_step(ConicBoundary.parabola(), TransversalField.exotic("2b2"),
                          PhaseState([0.0, -1.0], [1.0, 0.0]))

    def test_singular_hit(self):
        # vertical ray down the axis hits the tangency point (0, 0) of case 2b1
        with pytest.raises(SingularReflection):
            billiard_step(ConicBoundary.parabola(), TransversalField.exotic("2b1"),
                          PhaseState([0.0, 2.0], [0.0, -1.0]))


class TestSurfaces:
    def test_plane_lift(self):
        assert lift_to_surface(SurfaceModel.plane(), HomogeneousPoint((2.0, 4.0, 2.0))) == pytest.approx([1, 2, 1])

    def test_hyperbolic_apex(self):
        assert lift_to_surface(SurfaceModel.hyperbolic(), HomogeneousPoint((0, 0, 1))) == pytest.approx([0, 0, 1])

    def test_sphere_lift(self):
        model = SurfaceModel.sphere()
        X = lift_to_surface(model, HomogeneousPoint((1, 1, 1)))
        assert X == pytest.approx(np.ones(3) / math.sqrt(3))
        assert model.surface_residual(X) < 1e-15

    def test_outside_absolute(self):
        with pytest.raises(OutsideDomain):
            lift_to_surface(SurfaceModel.hyperbolic(), HomogeneousPoint((2, 0, 1)))

    @pytest.mark.parametrize("model", [SurfaceModel.plane(), SurfaceModel.sphere(), SurfaceModel.hyperbolic()])
    def test_projection_round_trip(self, model):
        p = HomogeneousPoint((0.2, -0.3, 1.0))
        X = lift_to_surface(model, p)
        assert model.surface_residual(X) < 1e-12
        assert project_pi(X) == p

    def test_sphere_latitude_equal_angles(self):
        model = SurfaceModel.sphere()
        h = 0.4
        rho = math.sqrt(1 - h * h)
        # cone over the latitude circle x3 = h
        cone = Conic(np.diag([h * h, h * h, -rho * rho]))
        X = np.array([0.0, 0.0, 1.0])
        V = np.array([1.0, 0.3, 0.0])
        state = surface_billiard_step(model, cone, SurfaceState(X, V))
        for _ in range(10):
            Y = state.point
            assert Y[2] == pytest.approx(h, abs=1e-12)
            # spherical angle between the outgoing geodesic and the boundary circle
            tang = np.cross([0.0, 0.0, 1.0], Y)
            tang /= np.linalg.norm(tang)
            w = state.velocity / np.linalg.norm(state.velocity)
            nxt = surface_billiard_step(model, cone, state)
            # incoming velocity at the next hit equals the velocity before reflection
            pos_in = nxt.point
            # angle with the boundary is preserved by the latitude's rotational symmetry
            tang2 = np.cross([0.0, 0.0, 1.0], pos_in)
            tang2 /= np.linalg.norm(tang2)
            w2 = nxt.velocity / np.linalg.norm(nxt.velocity)
            assert abs(w @ tang) == pytest.approx(abs(w2 @ tang2), abs=1e-10)
            state = nxt

    def test_sphere_reflection_angles(self):
        model = SurfaceModel.sphere()
        Y = np.array([0.6, 0.0, 0.8])
        ell = np.diag([0.64, 0.64, -0.36]) @ Y
        J = model.reflection(Y, ell)
        tang = np.array([0.0, 1.0, 0.0])
        for W in (np.array([-0.8, 0.5, 0.6]), np.array([0.3, -1.0, -0.225])):
            W = model.tangent_projection(Y, W)
            out = J(W)
            # equal angles with the boundary tangent, opposite normal components
            assert out @ tang == pytest.approx(W @ tang, abs=1e-12)
            assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(W), abs=1e-12)
            assert out @ Y == pytest.approx(0.0, abs=1e-12)

    def test_hyperbolic_angular_momentum(self):
        model = SurfaceModel.hyperbolic()
        c = 1.5
        cone = Conic(np.diag([c * c, c * c, -(c * c - 1)]))
        X = np.array([0.0, 0.0, 1.0])
        V = np.array([1.0, 0.4, 0.0])
        state = surface_billiard_step(model, cone, SurfaceState(X, V))
        ang = state.point[0] * state.velocity[1] - state.point[1] * state.velocity[0]
        for _ in range(50):
            state = surface_billiard_step(model, cone, state)
            assert state.point[2] == pytest.approx(c, abs=1e-10)
            assert state.point[0] * state.velocity[1] - state.point[1] * state.velocity[0] == \
                pytest.approx(ang, abs=1e-10)

    @pytest.mark.parametrize("model", [SurfaceModel.sphere(), SurfaceModel.hyperbolic()])
    def test_form_value_conserved(self, model):
        cone = Conic(np.diag([1.0, 2.0, -0.5]))
        rng = np.random.default_rng(5)
        for _ in range(50):
            X = lift_to_surface(model, HomogeneousPoint((rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), 1.0)))
            V = model.tangent_projection(X, rng.normal(size=3))
            out = surface_billiard_step(model, cone, SurfaceState(X, V))
            before = V @ model.form @ V
            assert abs(out.velocity @ model.form @ out.velocity - before) < 1e-12 * max(1.0, before)

    def test_sphere_projects_to_projective_billiard(self):
        # the projected spherical billiard is the planar billiard with the identity-orthogonal field
        model = SurfaceModel.sphere()
        boundary = ConicBoundary.ellipse(0.8, 0.5)
        table = Table(boundary, TransversalField.a_orthogonal(np.eye(3)))
        x = np.array([0.1, 0.05])
        v = np.array([1.0, 0.7])
        X = lift_to_surface(model, HomogeneousPoint(np.append(x, 1.0)))
        # velocity on the sphere whose projection is the planar direction v
        V = model.tangent_projection(X, np.append(v, 0.0))
        sstate = SurfaceState(X, V)
        pstate = PhaseState(x, v)
        for _ in range(20):
            sstate = surface_billiard_step(model, boundary.conic, sstate)
            pstate = billiard_step(boundary, table, pstate)
            Y = sstate.point
            assert proj_distance(Y, np.append(pstate.point, 1.0)) < 1e-9
            # projected geodesic: the plane spanned by Y and W meets z = 1 in the planar chord line
            plane = np.cross(Y, sstate.velocity)
            assert proj_distance(plane, pstate.line.coords) < 1e-9


class TestDuality:
    def test_circle_gives_angular_billiard(self):
        dual = dualize_billiard(ConicBoundary.circle(), TransversalField.normal())
        assert isinstance(dual, DualBilliard)
        assert dual.gamma.equals(Conic(np.diag([1.0, 1.0, -1.0])))
        for t in np.linspace(0.1, 6.0, 9):
            P = dual.point(t).coords
            sigma = dual.involution(t)
            # reflection of the ray through the affine point about OP: tangent-line chart point
            p = P[:2] / P[2]
            u = p / np.linalg.norm(p)
            tdir = np.array([-u[1], u[0]])
            for s in (0.3, -1.2):
                a = p + s * tdir
                img = sigma(np.append(a, 1.0)).affine()
                assert np.real(img) == pytest.approx(p - s * tdir, abs=1e-10)

    def test_central_field_gives_outer_billiard(self):
        dual = dualize_billiard(ConicBoundary.ellipse(2, 1), TransversalField.central([0.0, 0.0]))
        for t in np.linspace(0.2, 6.0, 7):
            P = dual.point(t).affine().real
            L = dual.tangent_line(t)
            a = np.cross(L.coords, [1.0, 0.3, 0.0])
            a = a / a[2]
            img = dual.involution(t, "conjugate")(a).affine().real
            assert (img + a[:2]) / 2 == pytest.approx(P, abs=1e-9)

    def test_conjugacy(self):
        boundary = ConicBoundary.ellipse(2, 1)
        table = Table(boundary, TransversalField.dual_pencil(Conic.ellipse(0.6, 0.9)))
        dual = dualize_billiard(boundary, table.field)
        rng = np.random.default_rng(6)
        for _ in range(100):
            t = rng.uniform(0, 2 * math.pi)
            inv = table.involution(t)
            x = boundary.homogeneous(t)
            line = np.cross(x, rng.normal(size=3))
            # reflect the direction of the line through Q, then dualize both sides
            d = np.cross(line, [0.0, 0.0, 1.0])[:2]
            reflected = HomogeneousLine.from_point_direction(x[:2] / x[2], inv(d))
            sigma = dual.involution(t, "invariant")
            assert proj_distance(sigma(line).coords, reflected.coords) < 1e-9
