"""Action integrals along Keplerian arcs and the identities they satisfy.

With dt = k r ds in the native anomaly s and |v|**2 = 2 (H + 1/r),

    w = integral |v|**2 dt          = 2 k integral (H r + 1) ds
    S = integral (|v|**2/2 + 1/r) dt =   k integral (H r + 2) ds

Both integrands are smooth in s, including through collisions on
rectilinear orbits where s is the cycloid parameter.
"""
import math
from dataclasses import dataclass

import numpy as np

from .conic import KeplerianArc, RectilinearOrbit, Vec2
from .errors import DegenerateError, InfeasibleError, NonConvergenceError
from .geometry import EPS, ChordConfig, gauss_arcs, h_min
from .kepler import anomaly_scale, position_at, radius_array, state_at, time_of_flight

NODES_PER_PANEL = 64
QUAD_RTOL = 1e-12
MAX_DOUBLINGS = 12

_leggauss = {}


def _nodes(n):
    if n not in _leggauss:
        _leggauss[n] = np.polynomial.legendre.leggauss(n)
    return _leggauss[n]


def _integrate(f, a, b, panels):
    x, wts = _nodes(NODES_PER_PANEL)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = f(pts).reshape(panels, NODES_PER_PANEL)
    return float(np.sum(half * (vals @ wts)))


def anomaly_quadrature(f, a, b):
    """Gauss-Legendre over [a, b], one 64-node panel per pi of anomaly,
    panel count doubled until two estimates agree to 1e-12."""
    panels = max(1, int(math.ceil((b - a) / math.pi)))
    prev = _integrate(f, a, b, panels)
    for _ in range(MAX_DOUBLINGS):
        panels *= 2
        cur = _integrate(f, a, b, panels)
        if abs(cur - prev) <= QUAD_RTOL * abs(cur):
            return cur
        prev = cur
    raise NonConvergenceError("action quadrature did not settle")


def _action_integral(arc, c0):
    orbit = arc.orbit
    H = orbit.H
    k = anomaly_scale(orbit)
    return k * anomaly_quadrature(lambda s: H * radius_array(orbit, s) + c0, arc.s_A, arc.s_B)


def maupertuis_action(arc):
    """w, the time integral of |v|**2 along the arc."""
    return 2.0 * _action_integral(arc, 1.0)


def principal_action(arc):
    """S, the time integral of the Lagrangian |v|**2/2 + 1/r."""
    return _action_integral(arc, 2.0)


def maupertuis_closed_form(arc):
    """2 (H dt + k (s_B - s_A)): the integral of H r + 1 done by hand."""
    k = anomaly_scale(arc.orbit)
    return 2.0 * (arc.H * time_of_flight(arc) + k * (arc.s_B - arc.s_A))


@dataclass(frozen=True)
class ActionReport:
    w: float
    S: float
    dt: float
    H: float

    @property
    def identity_residual(self):
        """|S - (w - H dt)| relative to S."""
        return abs(self.S - (self.w - self.H * self.dt)) / abs(self.S)


def action_report(arc):
    return ActionReport(maupertuis_action(arc), principal_action(arc),
                        time_of_flight(arc), arc.H)


# ---------------------------------------------------------------------------
# dw/dH along the family with fixed ends

@dataclass(frozen=True)
class HamiltonCheck:
    dt: float
    dw_dH: float
    residual: float
    h: float                 # step actually used (may have been shrunk)
    near_collision: bool     # stencil family passes within 1e-6 of O (relative)
    noise_floor: float       # residual attributable to rounding in w

    def observed_order(self, coarser):
        """Convergence order observed against a check at a larger step."""
        return math.log10(coarser.residual / self.residual) / math.log10(coarser.h / self.h)


def _family_member(cfg, H, seed):
    """Arc on the Gauss branch of energy H nearest the seed's branch."""
    arcs = gauss_arcs(cfg, H, seed.orbit.orientation, seed.revolutions)
    if not arcs:
        return None
    E = seed.orbit.conic.E
    return min(arcs, key=lambda a: (a.orbit.conic.E - E).norm())


def _pericenter(arc):
    c = arc.orbit.conic
    return c.gamma / (1.0 + c.eccentricity)


def verify_hamilton_dwdH(arc, h=1e-5, min_h=1e-9):
    """Central difference of w over energy with the ends of ``arc`` held
    fixed, compared with the elapsed time.

    The step shrinks when H - h falls below the minimal energy of the
    chord or when a stencil member is missing.
    """
    if isinstance(arc.orbit, RectilinearOrbit):
        raise ValueError("fixed-ends family needs endpoints off a common ray")
    A = position_at(arc.orbit, arc.s_A)
    B = position_at(arc.orbit, arc.s_B)
    cfg = ChordConfig(A, B)
    H = arc.H
    hm = h_min(cfg)
    if H <= hm:
        raise InfeasibleError("seed arc at or below the minimal energy")
    dt = time_of_flight(arc)
    while h >= min_h:
        if H - h > hm:
            lo = _family_member(cfg, H - h, arc)
            hi = _family_member(cfg, H + h, arc)
            if lo is not None and hi is not None:
                w_hi, w_lo = maupertuis_action(hi), maupertuis_action(lo)
                dw = (w_hi - w_lo) / (2.0 * h)
                scale = max(A.norm(), B.norm())
                near = min(_pericenter(lo), _pericenter(hi)) < 1e-6 * scale
                floor = 32.0 * EPS * max(w_hi, w_lo) / (h * dt)
                return HamiltonCheck(dt, dw, abs(dw - dt) / dt, h, near, floor)
        h *= 0.5
    raise InfeasibleError("no admissible stencil around this energy")


# ---------------------------------------------------------------------------
# velocity decomposition and tangent bisector

@dataclass(frozen=True)
class JacobiDecomposition:
    k: Vec2
    rho: float
    parallel_residual: float   # |sin| of the angle between vA - vB and eA + eB
    closure_residual: float    # |(vA - rho eA) - (vB + rho eB)| / |k|
    chord_residual: float      # |sin| of the angle between k and B - A


def _end_states(arc):
    return state_at(arc.orbit, arc.s_A), state_at(arc.orbit, arc.s_B)


def _sin_between(u, v):
    nu, nv = u.norm(), v.norm()
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return abs(u.cross(v)) / (nu * nv)


def jacobi_velocity_decomposition(arc):
    """vA = k + rho eA and vB = k - rho eB with eA, eB the unit radius
    vectors at the ends; k lies along the chord."""
    sA, sB = _end_states(arc)
    eA = sA.q / sA.r
    eB = sB.q / sB.r
    s = eA + eB
    if s.norm() < 1e-12:
        raise DegenerateError("antipodal directions: decomposition degenerate")
    dv = sA.v - sB.v
    rho = dv.dot(s) / s.dot(s)
    k = sA.v - eA * rho
    k2 = sB.v + eB * rho
    return JacobiDecomposition(k, rho, _sin_between(dv, s),
                               (k - k2).norm() / max(k.norm(), 1e-300),
                               _sin_between(k, sB.q - sA.q))


@dataclass(frozen=True)
class BisectorVerdict:
    Q: Vec2
    line_distance: float   # distance from Q to the line O + t (vB - vA), over |OQ|
    angle_gap: float       # |angle(A O Q) - angle(Q O B)|

    def holds(self, tol=1e-10):
        return self.line_distance < tol and self.angle_gap < tol


def _angle(u, v):
    return math.atan2(abs(u.cross(v)), u.dot(v))


def bisector_tangent_check(arc):
    """Q, where the tangents at A and B meet, lies on the line through O
    along vB - vA, and that line bisects the angle AOB."""
    sA, sB = _end_states(arc)
    A, B, vA, vB = sA.q, sB.q, sA.v, sB.v
    den = vA.cross(vB)
    if abs(den) <= 1e-14 * vA.norm() * vB.norm():
        raise DegenerateError("parallel tangents: Q at infinity")
    t = (B - A).cross(vB) / den
    Q = A + vA * t
    d = vB - vA
    oq = Q.norm()
    dist = abs(d.cross(Q)) / d.norm()
    gap = abs(_angle(A, Q) - _angle(Q, B))
    return BisectorVerdict(Q, dist / oq, gap)
