"""Minimal deterministic SVG output and the figures drawn with it."""
import math
from xml.sax.saxutils import escape

import numpy as np

from .conic import ConicOrbit, Vec2
from .cycle import cycle_arc_at, rectilinear_limit, sample_phis
from .errors import InfeasibleError
from .geometry import ChordConfig, gauss_rescaled, h_min
from .kepler import arc_endpoints, position_at, radius_array

PALETTE = ("#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#2c3e50")


def _num(x):
    return format(float(x), ".6g")


class SvgCanvas:
    """Shapes in canvas units (y up), written with a fitted viewBox."""

    def __init__(self, width=640, title=None):
        self.width = width
        self.title = title
        self.items = []
        self.lo = [math.inf, math.inf]
        self.hi = [-math.inf, -math.inf]

    def _grow(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        self.lo = np.minimum(self.lo, pts.min(axis=0)).tolist()
        self.hi = np.maximum(self.hi, pts.max(axis=0)).tolist()

    def polyline(self, pts, color=PALETTE[0], width=1.0, dash=None):
        pts = np.asarray(pts, dtype=float)
        if len(pts) < 2:
            return
        self._grow(pts)
        self.items.append(("polyline", pts, color, width, dash))

    def point(self, p, color="#000000", radius=3.0, label=None):
        self._grow([p])
        self.items.append(("point", np.asarray(p, dtype=float), color, radius, label))

    def render(self):
        if not self.items:
            raise ValueError("nothing to draw")
        span = max(self.hi[0] - self.lo[0], self.hi[1] - self.lo[1], 1e-12)
        pad = 0.05 * span
        x0, y0 = self.lo[0] - pad, self.lo[1] - pad
        w = self.hi[0] - self.lo[0] + 2 * pad
        h = self.hi[1] - self.lo[1] + 2 * pad
        px = self.width / w   # pixels per unit

        def tx(p):
            return _num((p[0] - x0) * px), _num((y0 + h - p[1]) * px)

        height = h * px
        out = ['<?xml version="1.0" encoding="UTF-8"?>',
               f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(self.width)}" '
               f'height="{_num(height)}" viewBox="0 0 {_num(self.width)} {_num(height)}">']
        if self.title:
            out.append(f"<title>{escape(self.title)}</title>")
        out.append(f'<rect width="{_num(self.width)}" height="{_num(height)}" fill="#ffffff"/>')
        for item in self.items:
            if item[0] == "polyline":
                _, pts, color, width, dash = item
                coords = " ".join(",".join(tx(p)) for p in pts)
                extra = f' stroke-dasharray="{dash}"' if dash else ""
                out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                           f'stroke-width="{_num(width)}"{extra}/>')
            else:
                _, p, color, radius, label = item
                cx, cy = tx(p)
                out.append(f'<circle cx="{cx}" cy="{cy}" r="{_num(radius)}" fill="{color}"/>')
                if label:
                    out.append(f'<text x="{_num(float(cx) + 5)}" y="{_num(float(cy) - 5)}" '
                               f'font-family="sans-serif" font-size="12">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _split_runs(pts, keep):
    """Consecutive runs of points where ``keep`` holds."""
    runs, cur = [], []
    for p, k in zip(pts, keep):
        if k:
            cur.append(p)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return runs


def branch_points(conic, r_max, n=400):
    """Points of the branch with r <= r_max (whole curve for an ellipse)."""
    orbit = ConicOrbit(conic, 1)
    if conic.e2m1 < 0.0:
        s = np.linspace(-math.pi, math.pi, n)
    else:
        hi = 1.0
        while radius_array(orbit, hi) < r_max and hi < 1e3:
            hi *= 2.0
        s = np.linspace(-hi, hi, n)
    r = radius_array(orbit, s)
    pts = [tuple(position_at(orbit, x)) for x in s]
    return _split_runs(pts, r <= r_max)


def arc_points(arc, n=200):
    s = np.linspace(arc.s_A, arc.s_B, n)
    return [tuple(position_at(arc.orbit, x)) for x in s]


# ---------------------------------------------------------------------------
# figures

def figure_chord_family(A, B, count=9, r_max=None):
    """Branches through A and B for energies from the minimum upwards."""
    cfg = ChordConfig(A, B)
    r_max = r_max or 3.0 * cfg.radii_sum
    hm = h_min(cfg)
    canvas = SvgCanvas(title="branches through A and B")
    energies = [hm * (1.0 - 1e-9)] + [hm * (1.0 - k / (count - 2)) for k in range(1, count - 2)]
    energies += [0.0, -hm]
    for i, H in enumerate(energies):
        for conic in gauss_rescaled(cfg, H):
            for run in branch_points(conic, r_max):
                canvas.polyline(run, PALETTE[i % len(PALETTE)], 1.0,
                                "4 3" if conic.kind == "parabola" else None)
    canvas.point((0.0, 0.0), label="O")
    canvas.point(cfg.A, "#c0392b", label="A")
    canvas.point(cfg.B, "#c0392b", label="B")
    return canvas.render()


def figure_equal_invariant(cycle, count=7):
    """Arcs of one cycle drawn together: same chord, radii sum and energy."""
    canvas = SvgCanvas(title="arcs sharing chord, radii sum and energy")
    for i, phi in enumerate(np.linspace(0.15, math.pi - 0.15, count)):
        arc = cycle_arc_at(cycle, float(phi))
        canvas.polyline(arc_points(arc), PALETTE[i % len(PALETTE)], 1.2)
        A, B = arc_endpoints(arc)
        canvas.point(A, PALETTE[i % len(PALETTE)], 2.0)
        canvas.point(B, PALETTE[i % len(PALETTE)], 2.0)
    canvas.point((0.0, 0.0), label="O")
    return canvas.render()


def figure_moving_foci(cycle, samples=180):
    """Seen from the chord midpoint, O and the second focus each trace an
    ellipse with foci at the chord ends (elliptic cycles)."""
    if cycle.H >= 0.0:
        raise InfeasibleError("second focus at finite distance needs H < 0")
    a = -0.5 / cycle.H
    o_path, f_path = [], []
    for phi in np.linspace(-math.pi, math.pi, samples + 1):
        phi = float(phi)
        if phi in (0.0, -math.pi, math.pi):
            continue
        A, B = cycle.endpoints_aligned(phi)
        G = (A + B) * 0.5
        conic = cycle.conic_aligned(phi)
        F = Vec2(2.0 * a * conic.alpha, 2.0 * a * conic.beta)
        o_path.append(tuple(-G))
        f_path.append(tuple(F - G))
    canvas = SvgCanvas(title="paths of both foci relative to the chord")
    canvas.polyline(o_path + o_path[:1], PALETTE[0], 1.2)
    canvas.polyline(f_path + f_path[:1], PALETTE[1], 1.2)
    c = cycle.half_chord
    canvas.point((-c, 0.0), label="A")
    canvas.point((c, 0.0), label="B")
    canvas.point(o_path[0], PALETTE[0], 2.5, "O")
    canvas.point(f_path[0], PALETTE[1], 2.5, "F")
    return canvas.render()


def figure_cycle(cycle, samples=24):
    """The whole family: arcs for phi in (0, pi), the reflected ones and both
    radial limits."""
    canvas = SvgCanvas(title="Lambert cycle")
    phis = sample_phis(max(samples, 8), phi_min=0.05, refine=0)
    for i, phi in enumerate(phis):
        for sgn, color in ((1.0, PALETTE[0]), (-1.0, PALETTE[1])):
            try:
                arc = cycle_arc_at(cycle, sgn * phi)
            except InfeasibleError:
                continue
            canvas.polyline(arc_points(arc), color, 0.8)
    for end in ("phi_to_0", "phi_to_pi"):
        canvas.polyline(arc_points(rectilinear_limit(cycle, end)), PALETTE[2], 2.0)
    canvas.point((0.0, 0.0), label="O")
    return canvas.render()
