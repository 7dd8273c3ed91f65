"""Acceptance criteria as plain functions returning an :class:`Outcome`.

Each function is deterministic for its fixed seeds; ``rows`` feed the CSV
serialization used by the determinism criterion.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from caustica.billiards import (
    ConicBoundary,
    ImplicitCurve,
    PhaseState,
    SurfaceModel,
    Table,
    TransversalField,
    billiard_step,
    dualize_billiard,
    exotic_tangency_locus,
)
from caustica.caustics import ConfocalPencil, check_absolute_caustic, check_complex_caustic
from caustica.integrals import (
    canonical_integral,
    check_dual_invariance,
    check_reflection_invariance,
    invariant_curve_integral,
    pencil_ratio_integral,
)
from caustica.pencil import a_orthogonal_field, degenerate_pencil_limit, equivalence_check, fields_agree
from caustica.polynomials import HomogeneousPolynomial as Poly
from caustica.projgeo import Conic, HomogeneousPoint, adjugate, tangent_lines_from_point
from caustica.scenario import Report, Row

ELLIPSE = ConicBoundary.ellipse(2, 1)
CONFOCAL = ConfocalPencil.euclidean(2, 1)
ABSOLUTE = np.diag([1.0, 1.0, 0.0])
CIRCLE_INTEGRAL = pencil_ratio_integral(np.diag([1.0, 1.0, -1.0]), ABSOLUTE)


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str
    rows: list = field(default_factory=list)

    def line(self) -> str:
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}  {self.title}: {self.detail}"

    def csv(self) -> str:
        return Report(f"criterion-{self.number}", [Row(c, k, r, ok) for c, k, r, ok in self.rows], 0.0).to_csv()


def _rows(check: str, residuals, tol: float, below: bool = True):
    return [(check, k, float(r), (r < tol) if below else (r > tol)) for k, r in enumerate(residuals)]


def _tangency(conic: Conic, line) -> float:
    adj = conic.adjugate()
    return float(abs(line @ adj @ line) / (np.linalg.norm(line) ** 2 * np.linalg.norm(adj)))


def confocal_chords(n: int = 500, seed: int = 11) -> Outcome:
    table = Table(ELLIPSE, TransversalField.normal())
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for lam in (0.2, 0.5, 0.8):
        caustic = CONFOCAL.member(lam)
        res = []
        while len(res) < n:
            t = rng.uniform(0, 2 * math.pi)
            q = ELLIPSE.homogeneous(t)
            line = tangent_lines_from_point(HomogeneousPoint(q), caustic)[int(rng.integers(2))]
            d = np.real(line.direction())
            if np.asarray(d) @ np.asarray(ELLIPSE.conic.matrix[:2, :] @ q) > 0:
                d = -d  # chord leaves Q into the table
            out = billiard_step(ELLIPSE, table, PhaseState(q[:2], d))
            res.append(_tangency(caustic, out.line.coords))
        worst = max(worst, max(res))
        rows += _rows(f"lambda={lam}", res, 1e-9)
    return Outcome(1, "confocal caustic invariance", worst < 1e-9, f"max tangency residual {worst:.2e} < 1e-9",
                   rows)


NON_CONFOCAL = [Conic.ellipse(math.sqrt(3), math.sqrt(2)), Conic.ellipse(1.5, 0.5), Conic.circle(0.7),
                Conic.ellipse(1.2, 0.9), Conic(np.array([[1.0, 0.3, 0.1], [0.3, 2.0, 0.0], [0.1, 0.0, -1.0]]))]


def complex_caustic_split(n: int = 300, seed: int = 12) -> Outcome:
    rows, ok = [], True
    pos = 0.0
    for lam in (0.2, 0.5, 0.8):
        rep = check_complex_caustic(ELLIPSE, TransversalField.normal(), CONFOCAL.member(lam), n, seed)
        pos = max(pos, rep.max)
        ok &= rep.passed and len(rep.residuals) == n
        rows += _rows(f"confocal:{lam}", rep.residuals, 1e-9)
    neg = math.inf
    for k, alpha in enumerate(NON_CONFOCAL):
        rep = check_complex_caustic(ELLIPSE, TransversalField.normal(), alpha, n, seed)
        neg = min(neg, rep.max)
        rows.append((f"non-confocal:{k}", 0, rep.max, rep.max > 1e-3))
    oval = ImplicitCurve({(4, 0): 1 / 16, (0, 4): 1.0, (0, 0): -1.0})
    oval_table = Table(oval, TransversalField.normal())
    quartic = math.inf
    for p in np.linspace(0.4, 1.6, 5):
        for q in np.linspace(0.2, 0.8, 5):
            rep = check_complex_caustic(oval, oval_table, Conic.ellipse(p, q), n, seed)
            quartic = min(quartic, rep.max)
            rows.append((f"oval:{p:g}:{q:g}", 0, rep.max, rep.max > 1e-3))
    ok = ok and neg > 1e-3 and quartic > 1e-3
    return Outcome(2, "complex-caustic positive/negative split", ok,
                   f"confocal max {pos:.2e}; non-confocal min-of-max {neg:.2e}; quartic oval min-of-max {quartic:.2e}",
                   rows)


CANONICAL_CASES = [("2a1", 1), ("2a1", 2), ("2a2", 1), ("2a2", 2), ("2b1", None), ("2b2", None),
                   ("2c1", None), ("2c2", None), ("2d", None)]


def canonical_conservation(n: int = 200, seed: int = 13) -> Outcome:
    parabola = ConicBoundary.parabola()
    rows, worst, ok = [], 0.0, True
    for case, N in CANONICAL_CASES:
        rep = check_reflection_invariance(canonical_integral(case, N), parabola, TransversalField.exotic(case, N),
                                          n, seed, tol=1e-8, exclusion=1e-3)
        worst = max(worst, rep.max)
        ok &= rep.passed and len(rep.residuals) == n
        rows += _rows(f"{case}:{N}", rep.residuals, 1e-8)
    return Outcome(3, "canonical-integral conservation", ok, f"max relative jump {worst:.2e} < 1e-8 over 9 runs",
                   rows)


E = (0.0, 1.0, 0.0)
EXPECTED_LOCI = {
    "2a1": [(0, 0, 1), E],
    "2a2": [(0, 0, 1), E],
    "2b1": [(0, 0, 1), (-1, 1, 1), E],
    "2c2": [(0, 0, 1), (-1, 1, 1), E],
    "2d": [(0, 0, 1), (-1, 1, 1), E],
    "2b2": [(1j, -1, 1), (-1j, -1, 1), E],
    "2c1": [(-cmath.exp(2j * math.pi * j / 3), cmath.exp(4j * math.pi * j / 3), 1) for j in range(3)],
}


def _coord_residual(p, q) -> float:
    p, q = np.asarray(p, dtype=complex), np.asarray(q, dtype=complex)
    k = int(np.argmax(np.abs(q)))
    if abs(p[k]) == 0:
        return math.inf
    return float(np.max(np.abs(p / p[k] - q / q[k])))


def tangency_loci() -> Outcome:
    rows, worst, ok = [], 0.0, True
    for case, expected in EXPECTED_LOCI.items():
        got = [p.coords for p in exotic_tangency_locus(case, 1)]
        if len(got) != len(expected):
            ok = False
            rows.append((case, 0, math.inf, False))
            continue
        for k, q in enumerate(expected):
            r = min(_coord_residual(p, q) for p in got)
            worst = max(worst, r)
            rows.append((case, k, r, r < 1e-10))
            ok &= r < 1e-10
    return Outcome(4, "tangency loci", ok, f"max coordinate residual {worst:.2e} < 1e-10", rows)


def duality_transport(n: int = 200, seed: int = 14) -> Outcome:
    companion = Conic.ellipse(0.5, 0.8)
    confocal = pencil_ratio_integral(ELLIPSE.conic.adjugate(), ABSOLUTE)
    pairs = [
        ("circle", ConicBoundary.circle(), TransversalField.normal(), CIRCLE_INTEGRAL),
        ("ellipse-confocal", ELLIPSE, TransversalField.normal(), confocal),
        ("ellipse-wrong", ELLIPSE, TransversalField.normal(),
         pencil_ratio_integral(np.diag([1.0, 3.0, -1.0]), ABSOLUTE)),
        ("dual-pencil", ELLIPSE, TransversalField.dual_pencil(companion),
         pencil_ratio_integral(ELLIPSE.conic.adjugate(), companion.adjugate())),
        ("dual-pencil-wrong", ELLIPSE, TransversalField.dual_pencil(companion), confocal),
    ]
    rows, agree, circle = [], 0, math.inf
    for name, boundary, fld, R in pairs:
        rep = check_dual_invariance(R, dualize_billiard(boundary, fld), n, seed, tol=1e-10)
        agree += rep.verdicts_agree
        rows.append((f"{name}:agree", 0, 0.0 if rep.verdicts_agree else 1.0, rep.verdicts_agree))
        if name == "circle":
            circle = max(rep.max, rep.primal.max)
            rows += _rows("circle:dual", rep.residuals, 1e-10) + _rows("circle:primal", rep.primal.residuals, 1e-10)
    ok = agree == len(pairs) and circle < 1e-10
    return Outcome(5, "duality transport", ok,
                   f"{agree}/{len(pairs)} verdict pairs agree; unit circle max jump {circle:.2e} < 1e-10", rows)


def invariant_curve(n: int = 200, seed: int = 15) -> Outcome:
    dual = dualize_billiard(ELLIPSE, TransversalField.normal())
    gamma = dual.gamma.matrix / np.max(np.abs(dual.gamma.matrix))
    member = Poly.quadratic_form(gamma - 0.5 * ABSOLUTE)
    stranger = Poly.quadratic_form(np.diag([1.0, 2.0, -1.0]))
    good = check_dual_invariance(invariant_curve_integral(member, 2), dual, n, seed, tol=1e-10, cross_check=False)
    bad = check_dual_invariance(invariant_curve_integral(stranger, 2), dual, n, seed, tol=1e-10, cross_check=False)
    ok = good.passed and len(good.residuals) == n and bad.max > 1e-3
    rows = _rows("member", good.residuals, 1e-10) + [("non-member", 0, bad.max, bad.max > 1e-3)]
    return Outcome(6, "invariant-curve integral", ok,
                   f"member max {good.max:.2e} < 1e-10; non-member max {bad.max:.2e} > 1e-3", rows)


# (boundary, form A, dual member adj(A)) for the sphere, hyperbolic and planar types
PENCILS = {
    "sphere": (ConicBoundary.ellipse(2, 1), np.eye(3), np.eye(3)),
    "hyperbolic": (ConicBoundary.ellipse(0.3, 0.2), np.diag([4.0, 4.0, -1.0]), np.diag([-4.0, -4.0, 16.0])),
    "plane": (ConicBoundary.ellipse(2, 1), ABSOLUTE, np.diag([0.0, 0.0, 1.0])),
}


def dual_pencil_fields(n: int = 200, seed: int = 16) -> Outcome:
    rows, worst = [], 0.0
    for kind, (boundary, form, member) in PENCILS.items():
        c_dual = boundary.conic.adjugate()
        c_dual = c_dual / np.max(np.abs(c_dual))
        ortho = a_orthogonal_field(boundary, form)
        poles = [TransversalField.dual_pencil(Conic(adjugate(c_dual + mu * member))) for mu in (0.3, 1.7, -2.5)]
        for k, f in enumerate(poles):
            d = fields_agree(boundary, ortho, f, n, seed)
            worst = max(worst, max(d))
            rows += _rows(f"{kind}:orthogonal-vs-pole:{k}", d, 1e-10)
        d = fields_agree(boundary, poles[0], poles[2], n, seed)
        worst = max(worst, max(d))
        rows += _rows(f"{kind}:member-independence", d, 1e-10)
    return Outcome(7, "dual-pencil field double construction", worst < 1e-10,
                   f"max line discrepancy {worst:.2e} < 1e-10 over three pencils", rows)


def constant_curvature_equivalence(n: int = 100, seed: int = 17) -> Outcome:
    rows, ok, worst = [], True, 0.0
    for kind in ("sphere", "hyperbolic"):
        boundary, form, _ = PENCILS[kind]
        rep = equivalence_check(boundary, a_orthogonal_field(boundary, form), form, n, seed, tol=1e-9)
        ok &= rep.passed and rep.model == kind
        worst = max(worst, rep.max)
        rows += _rows(kind, rep.residuals, 1e-9)
    limit = degenerate_pencil_limit(np.diag([1.0, 1.0, -1.0]), ABSOLUTE, 1.0)
    circle = ConicBoundary.circle()
    rep = equivalence_check(circle, a_orthogonal_field(circle, limit), limit, n, seed, tol=1e-9)
    ok &= rep.passed and rep.model == "plane"
    worst = max(worst, rep.max)
    rows += _rows("plane", rep.residuals, 1e-9)
    diag_limit = degenerate_pencil_limit(np.diag([1.0, 1.0, 2.0]), np.eye(3), 1.0)
    diag_err = float(np.max(np.abs(diag_limit - ABSOLUTE)))
    rows.append(("diag-limit", 0, diag_err, diag_err < 1e-7))
    ok &= diag_err < 1e-7
    return Outcome(8, "constant-curvature equivalence", ok,
                   f"max discrepancy {worst:.2e} < 1e-9; diag limit error {diag_err:.2e} < 1e-7", rows)


def absolute_caustic(n: int = 100, seed: int = 18) -> Outcome:
    rows, ok, worst = [], True, 0.0
    for model in (SurfaceModel.sphere(), SurfaceModel.hyperbolic()):
        rep = check_absolute_caustic(model, n, seed, tol=1e-9)
        ok &= rep.passed and rep.permuted == n
        worst = max(worst, rep.max)
        rows += _rows(model.tag, rep.residuals, 1e-9)
    return Outcome(9, "absolute as complex caustic", ok, f"max setwise residual {worst:.2e} < 1e-9", rows)


CRITERIA = [confocal_chords, complex_caustic_split, canonical_conservation, tangency_loci, duality_transport,
            invariant_curve, dual_pencil_fields, constant_curvature_equivalence, absolute_caustic]


def determinism(first: list[Outcome]) -> Outcome:
    again = [c() for c in CRITERIA]
    same = sum(a.csv().encode() == b.csv().encode() for a, b in zip(first, again))
    return Outcome(10, "determinism", same == len(CRITERIA),
                   f"{same}/{len(CRITERIA)} suites reproduce byte-identical CSV reports")


if __name__ == "__main__":
    outcomes = [c() for c in CRITERIA]
    outcomes.append(determinism(outcomes))
    for o in outcomes:
        print(o.line())
