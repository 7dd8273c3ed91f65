"""Projective, dual and constant-curvature billiards with caustic and integral checks."""

from .billiards import (
    ConicBoundary,
    DualBilliard,
    ImplicitCurve,
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
from .caustics import (
    ConfocalPencil,
    DualPencilFamily,
    check_absolute_caustic,
    check_complex_caustic,
    check_invariant_curve,
    confocal_member,
    dual_pencil_member,
    tangential_correspondence_samples,
)
from .integrals import (
    MomentVector,
    RationalIntegral,
    canonical_integral,
    check_dual_invariance,
    check_reflection_invariance,
    eval_rational_integral,
    invariant_curve_integral,
    moment_vector,
    pencil_ratio_integral,
)
from .pencil import (
    a_orthogonal_field,
    degenerate_pencil_limit,
    equivalence_check,
    form_signature,
    normalize_form,
)
from .polynomials import HomogeneousPolynomial
from .projgeo import (
    Conic,
    HomogeneousLine,
    HomogeneousPoint,
    ProjectiveMap,
    apply_map,
    cross_ratio,
    dualize_conic,
    harmonic_conjugate,
    orthogonal_polarity,
    polar_line,
    pole_of_line,
    tangent_lines_from_point,
)
from .reflectors import (
    build_projective_involution,
    constant_curvature_reflection,
    line_involution_fixing_point,
    mirror_reflection,
    reflect_line_pencil,
)
from .scenario import parse_scenario, run_scenario
from .svg import render_orbit_svg

__all__ = [
    "ConfocalPencil",
    "Conic",
    "ConicBoundary",
    "DualBilliard",
    "DualPencilFamily",
    "HomogeneousLine",
    "HomogeneousPoint",
    "HomogeneousPolynomial",
    "ImplicitCurve",
    "MomentVector",
    "PhaseState",
    "ProjectiveMap",
    "RationalIntegral",
    "SurfaceModel",
    "SurfaceState",
    "Table",
    "TransversalField",
    "a_orthogonal_field",
    "apply_map",
    "billiard_step",
    "build_projective_involution",
    "canonical_integral",
    "check_absolute_caustic",
    "check_complex_caustic",
    "check_dual_invariance",
    "check_invariant_curve",
    "check_reflection_invariance",
    "confocal_member",
    "constant_curvature_reflection",
    "cross_ratio",
    "degenerate_pencil_limit",
    "dual_pencil_member",
    "dualize_billiard",
    "dualize_conic",
    "equivalence_check",
    "eval_rational_integral",
    "exotic_tangency_locus",
    "form_signature",
    "harmonic_conjugate",
    "invariant_curve_integral",
    "lift_to_surface",
    "line_involution_fixing_point",
    "mirror_reflection",
    "moment_vector",
    "normalize_form",
    "orbit",
    "orthogonal_polarity",
    "parse_scenario",
    "pencil_ratio_integral",
    "polar_line",
    "pole_of_line",
    "project_pi",
    "reflect_line_pencil",
    "render_orbit_svg",
    "run_scenario",
    "surface_billiard_step",
    "tangent_lines_from_point",
    "tangential_correspondence_samples",
    "transversal_field_eval",
]

__version__ = "0.1.0"
