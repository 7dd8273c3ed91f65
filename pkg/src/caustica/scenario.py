"""Declarative experiment scenarios: parsing, dispatch and CSV reports.

A scenario is an INI file.  ``[scenario]`` names the experiment; ``[table]``
describes the billiard; one further section holds the experiment inputs.
Conics are six coefficients ``a11 a12 a13 a22 a23 a33`` of the symmetric
matrix.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import billiards as bl
from .caustics import (
    check_complex_caustic,
    check_invariant_curve,
)
from .errors import ConfigParse, GeometryError
from .integrals import (
    canonical_integral,
    check_dual_invariance,
    check_reflection_invariance,
    invariant_curve_integral,
    pencil_ratio_integral,
)
from .pencil import equivalence_check, form_signature, normalize_form
from .polynomials import HomogeneousPolynomial
from .projgeo import Conic, adjugate, proj_distance
from .reflectors import LineInvolution
from .svg import render_orbit_svg

EXPERIMENTS = (
    "simulate",
    "verify-caustic",
    "verify-integral",
    "verify-invariant-curve",
    "classify-pencil",
    "dualize",
    "equivalence",
)
CSV_COLUMNS = ("scenario", "check_id", "sample_id", "residual", "verdict")


@dataclass
class Scenario:
    name: str
    experiment: str
    samples: int
    seed: int
    tol: float
    sections: dict
    source: Path | None = None
    svg: bool = False

    def section(self, name: str) -> dict:
        if name not in self.sections:
            raise ConfigParse(f"scenario {self.name!r}: missing section [{name}]")
        return self.sections[name]

    def get(self, section: str, key: str, default=None):
        sec = self.sections.get(section, {})
        if key in sec:
            return sec[key]
        if default is None:
            raise ConfigParse(f"scenario {self.name!r}: missing key {key!r} in [{section}]")
        return default


@dataclass
class Row:
    check_id: str
    sample_id: int
    residual: float
    passed: bool


@dataclass
class Report:
    scenario: str
    rows: list[Row]
    tol: float
    runtime: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def max(self) -> float:
        return max((r.residual for r in self.rows), default=0.0)

    @property
    def mean(self) -> float:
        return float(np.mean([r.residual for r in self.rows])) if self.rows else 0.0

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.passed for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([self.scenario, r.check_id, r.sample_id, f"{r.residual:.12e}", "pass" if r.passed else "fail"])
        return buf.getvalue()


# --------------------------------------------------------------------------
# parsing


def _floats(text: str, count: int | None, what: str) -> list[float]:
    try:
        vals = [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigParse(f"{what}: {exc}") from exc
    if count is not None and len(vals) != count:
        raise ConfigParse(f"{what}: expected {count} numbers, got {len(vals)}")
    return vals


def parse_conic(text: str, what: str = "conic") -> Conic:
    return Conic.from_coefficients(*_floats(text, 6, what))


def parse_matrix(text: str, what: str = "matrix") -> np.ndarray:
    return parse_conic(text, what).matrix


def parse_scenario(source, overrides: dict | None = None) -> Scenario:
    """Parse a scenario from a path or from INI text."""
    parser = configparser.ConfigParser(interpolation=None)
    path = None
    try:
        if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
            path = Path(source)
            parser.read_string(path.read_text(), source=str(path))
        else:
            parser.read_string(str(source))
    except configparser.Error as exc:
        raise ConfigParse(str(exc)) from exc
    except OSError as exc:
        raise ConfigParse(f"cannot read {source}: {exc}") from exc
    if "scenario" not in parser:
        raise ConfigParse("missing section [scenario]")
    head = parser["scenario"]
    name = head.get("name") or (path.stem if path else None)
    if not name:
        raise ConfigParse("missing key 'name' in [scenario]")
    experiment = head.get("experiment")
    if experiment is None:
        raise ConfigParse("missing key 'experiment' in [scenario]")
    if experiment not in EXPERIMENTS:
        raise ConfigParse(f"unknown experiment {experiment!r}; expected one of {', '.join(EXPERIMENTS)}")
    overrides = overrides or {}
    try:
        samples = int(overrides.get("samples") or head.get("samples", "100"))
        seed = int(overrides["seed"] if overrides.get("seed") is not None else head.get("seed", "0"))
        tol = float(overrides.get("tol") or head.get("tol", "1e-9"))
        svg = head.getboolean("svg", fallback=experiment == "simulate")
    except ValueError as exc:
        raise ConfigParse(f"[scenario]: {exc}") from exc
    if samples <= 0:
        raise ConfigParse("samples must be positive")
    if not tol > 0:
        raise ConfigParse("tolerance must be positive")
    sections = {s: dict(parser[s]) for s in parser.sections()}
    scen = Scenario(name, experiment, samples, seed, tol, sections, path, svg)
    validate(scen)
    return scen


def validate(scen: Scenario):
    """Check that every referenced conic parses; raises ConfigParse naming the key."""
    for sec, entries in scen.sections.items():
        for key, value in entries.items():
            if key in ("conic", "companion", "form", "u", "a", "s_star", "caustic", "h", "candidate"):
                parse_conic(value, f"[{sec}] {key}")
    if scen.experiment != "classify-pencil":
        scen.get("table", "conic")
    required = {
        "verify-caustic": [("caustic", "conic")],
        "verify-invariant-curve": [("invariant-curve", "s_star")],
        "equivalence": [("equivalence", "form")],
        "classify-pencil": [("pencil", "u"), ("pencil", "a")],
    }
    for section, key in required.get(scen.experiment, []):
        scen.get(section, key)


def build_field(scen: Scenario) -> bl.TransversalField:
    kind = scen.get("table", "field", "normal")
    if kind == "normal":
        return bl.TransversalField.normal()
    if kind == "dual-pencil":
        return bl.TransversalField.dual_pencil(parse_conic(scen.get("table", "companion"), "[table] companion"))
    if kind == "a-orthogonal":
        return bl.TransversalField.a_orthogonal(parse_matrix(scen.get("table", "form"), "[table] form"))
    if kind == "central":
        return bl.TransversalField.central(_floats(scen.get("table", "center"), 2, "[table] center"))
    if kind == "exotic":
        case = scen.get("table", "case")
        n = scen.sections["table"].get("n")
        return bl.TransversalField.exotic(case, int(n) if n else None)
    raise ConfigParse(f"unknown field kind {kind!r}")


def build_table(scen: Scenario) -> bl.Table:
    conic = parse_conic(scen.get("table", "conic"), "[table] conic")
    window = _floats(scen.get("table", "window", "-3 3"), 2, "[table] window")
    try:
        boundary = bl.ConicBoundary(conic, tuple(window))
    except (ValueError, GeometryError) as exc:
        raise ConfigParse(f"[table] conic: {exc}") from exc
    return bl.Table(boundary, build_field(scen))


# --------------------------------------------------------------------------
# experiments


def _rows_from(values, check_id: str, tol: float) -> list[Row]:
    return [Row(check_id, k, float(v), float(v) < tol) for k, v in enumerate(values)]


def _simulate(scen: Scenario, out_dir: Path) -> Report:
    table = build_table(scen)
    sec = scen.sections.get("simulate", {})
    start = _floats(sec.get("start", "0 0"), 2, "[simulate] start")
    direction = _floats(sec.get("direction", "1 0.3"), 2, "[simulate] direction")
    bounces = int(sec.get("bounces", str(scen.samples)))
    caustic = parse_conic(sec["caustic"], "[simulate] caustic") if "caustic" in sec else None
    state = bl.PhaseState(np.array(start), np.array(direction))
    states = bl.orbit(table.boundary, table, state, bounces)
    rows = []
    for k, st in enumerate(states[1:]):
        res = table.boundary.on_boundary_residual(st.point)
        rows.append(Row("on-boundary", k, float(res), res < scen.tol))
        if caustic is not None:
            ell = st.line.coords
            adj = caustic.adjugate()
            tres = abs(ell @ adj @ ell) / (np.linalg.norm(ell) ** 2 * np.linalg.norm(adj))
            rows.append(Row("caustic-tangency", k, float(tres), tres < scen.tol))
    report = Report(scen.name, rows, scen.tol, notes={"bounces": len(states) - 1})
    if scen.svg:
        render_orbit_svg(states, table.boundary, caustic, out_dir / f"{scen.name}.svg")
    return report


def _verify_caustic(scen: Scenario) -> Report:
    table = build_table(scen)
    alpha = parse_conic(scen.get("caustic", "conic"), "[caustic] conic")
    model_tag = scen.sections.get("caustic", {}).get("model")
    model = bl.SurfaceModel.from_tag(model_tag) if model_tag else None
    rep = check_complex_caustic(table.boundary, table, alpha, scen.samples, scen.seed, scen.tol, model=model)
    return Report(scen.name, _rows_from(rep.residuals, "tangency", scen.tol), scen.tol,
                  notes={"permuted": rep.permuted, "fixed": rep.fixed})


def _integral(scen: Scenario, table: bl.Table):
    sec = scen.sections.get("integral", {})
    kind = sec.get("kind", "canonical")
    if kind == "canonical":
        case = sec.get("case") or table.field.case
        n = sec.get("n") or table.field.N
        return canonical_integral(case, int(n) if n else None)
    if kind == "pencil-ratio":
        return pencil_ratio_integral(parse_matrix(scen.get("integral", "u"), "[integral] u"),
                                     parse_matrix(scen.get("integral", "a"), "[integral] a"))
    if kind == "invariant-curve":
        h = HomogeneousPolynomial.quadratic_form(parse_matrix(scen.get("integral", "h"), "[integral] h"))
        return invariant_curve_integral(h, 2)
    raise ConfigParse(f"unknown integral kind {kind!r}")


def _verify_integral(scen: Scenario) -> Report:
    table = build_table(scen)
    R = _integral(scen, table)
    sec = scen.sections.get("integral", {})
    exclusion = float(sec.get("exclusion", "1e-3"))
    rep = check_reflection_invariance(R, table.boundary, table, scen.samples, scen.seed, scen.tol, exclusion)
    rows = _rows_from(rep.residuals, "reflection-jump", scen.tol)
    notes = {}
    if sec.get("dual", "false").lower() in ("1", "true", "yes"):
        dual = bl.DualBilliard(table, Conic(adjugate(table.boundary.conic.matrix)))
        drep = check_dual_invariance(R, dual, scen.samples, scen.seed, scen.tol, exclusion, cross_check=False)
        rows += _rows_from(drep.residuals, "dual-jump", scen.tol)
        notes["verdicts_agree"] = drep.passed == rep.passed
    return Report(scen.name, rows, scen.tol, notes=notes)


def _verify_invariant_curve(scen: Scenario) -> Report:
    table = build_table(scen)
    dual = bl.DualBilliard(table, Conic(adjugate(table.boundary.conic.matrix)))
    s_star = parse_conic(scen.get("invariant-curve", "s_star"), "[invariant-curve] s_star")
    rep = check_invariant_curve(dual, s_star, scen.samples, scen.seed, scen.tol)
    return Report(scen.name, _rows_from(rep.residuals, "pair-invariance", scen.tol), scen.tol)


def _classify_pencil(scen: Scenario) -> Report:
    u = parse_matrix(scen.get("pencil", "u"), "[pencil] u")
    a = parse_matrix(scen.get("pencil", "a"), "[pencil] a")
    lams = _floats(scen.get("pencil", "lambdas", "0 0.5 1 2"), None, "[pencil] lambdas")
    rows = []
    for k, lam in enumerate(lams):
        member = u - lam * a
        form = adjugate(member)
        sig = form_signature(form)
        try:
            norm = normalize_form(form)
            res = norm.congruence_residual(form)
            tag = norm.model.tag
        except GeometryError:
            res, tag = math.inf, "unsupported"
        rows.append(Row(f"member:{lam:g}:{tag}:{sig.positive}{sig.negative}{sig.zero}", k, float(res), res < scen.tol))
    return Report(scen.name, rows, scen.tol)


def _dualize(scen: Scenario) -> Report:
    table = build_table(scen)
    dual = bl.dualize_billiard(table.boundary, table.field)
    rng = np.random.default_rng(scen.seed)
    lo, hi = table.boundary.sample_domain
    rows = []
    k = 0
    while len(rows) < scen.samples:
        t = float(rng.uniform(lo, hi))
        phi = float(rng.uniform(0, math.pi))
        try:
            sigma: LineInvolution = dual.involution(t)
            inv = table.involution(t)
        except GeometryError:
            continue
        x = table.boundary.point(t)
        d = np.array([math.cos(phi), math.sin(phi)])
        line = np.cross([x[0], x[1], 1.0], [d[0], d[1], 0.0])
        img = inv(d)
        reflected = np.cross([x[0], x[1], 1.0], [img[0], img[1], 0.0])
        res = proj_distance(sigma(line).coords, reflected)
        rows.append(Row("conjugacy", k, float(res), res < scen.tol))
        k += 1
    return Report(scen.name, rows, scen.tol)


def _equivalence(scen: Scenario) -> Report:
    table = build_table(scen)
    form = parse_matrix(scen.get("equivalence", "form"), "[equivalence] form")
    rep = equivalence_check(table.boundary, table.field, form, scen.samples, scen.seed, scen.tol)
    return Report(scen.name, _rows_from(rep.residuals, f"equivalence:{rep.model}", scen.tol), scen.tol)


def run_scenario(scen, out_dir: Path | str = ".", overrides: dict | None = None, write: bool = True) -> Report:
    """Run one scenario and write ``<name>.csv`` (and ``<name>.svg`` for orbits) into ``out_dir``."""
    if not isinstance(scen, Scenario):
        scen = parse_scenario(scen, overrides)
    out_dir = Path(out_dir)
    if write:
        out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    dispatch = {
        "simulate": lambda: _simulate(scen, out_dir),
        "verify-caustic": lambda: _verify_caustic(scen),
        "verify-integral": lambda: _verify_integral(scen),
        "verify-invariant-curve": lambda: _verify_invariant_curve(scen),
        "classify-pencil": lambda: _classify_pencil(scen),
        "dualize": lambda: _dualize(scen),
        "equivalence": lambda: _equivalence(scen),
    }
    if scen.experiment == "simulate" and not write:
        scen.svg = False
    report = dispatch[scen.experiment]()
    report.runtime = time.perf_counter() - started
    if write:
        (out_dir / f"{scen.name}.csv").write_text(report.to_csv())
    return report


__all__ = [
    "EXPERIMENTS",
    "Report",
    "Row",
    "Scenario",
    "parse_scenario",
    "run_scenario",
]
