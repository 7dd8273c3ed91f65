"""Deterministic SVG plots of billiard orbits."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .billiards import Boundary, ConicBoundary, PhaseState
from .projgeo import Conic

CURVE_POINTS = 360


def _fmt(x: float) -> str:
    s = format(float(x), ".9g")
    return "0" if s == "-0" else s


def _polyline(points, **attrs) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in points)
    extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'  <polyline points="{pts}" fill="none"{extra}/>\n'


def _curve_points(boundary: Boundary) -> np.ndarray:
    lo, hi = boundary.sample_domain
    ts = np.linspace(lo, hi, CURVE_POINTS + 1)
    return np.array([boundary.point(t) for t in ts])


def _caustic_points(caustic: Conic, window) -> np.ndarray | None:
    try:
        return _curve_points(ConicBoundary(caustic, window))
    except Exception:
        return None  # imaginary or hyperbolic caustics are not drawn


def render_orbit_svg(orbit: list[PhaseState], boundary: Boundary, caustic: Conic | None, path) -> Path:
    """Boundary, chord polyline and optional caustic; byte-identical for identical inputs."""
    if not orbit:
        raise ValueError("orbit is empty")
    curve = _curve_points(boundary)
    chords = np.array([s.point for s in orbit])
    window = getattr(boundary, "window", (-3.0, 3.0))
    lo = curve.min(axis=0)
    hi = curve.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    lo = lo - 0.1 * span
    size = span * 1.2
    stroke = _fmt(0.004 * max(size))
    # y is flipped so the picture has the usual orientation
    view = f"{_fmt(lo[0])} {_fmt(-(lo[1] + size[1]))} {_fmt(size[0])} {_fmt(size[1])}"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view}" width="600" height="{_fmt(600 * size[1] / size[0])}">\n',
        _polyline(curve, stroke="black", stroke_width=stroke),
    ]
    if caustic is not None:
        pts = _caustic_points(caustic, window)
        if pts is not None:
            out.append(_polyline(pts, stroke="red", stroke_width=stroke, stroke_dasharray=_fmt(4 * float(stroke))))
    out.append(_polyline(chords, stroke="steelblue", stroke_width=stroke))
    out.append("</svg>\n")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(out))
    return path
