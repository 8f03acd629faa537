"""Time along Keplerian orbits.

The primary elapsed-time path is the universal-variable formula with
Stumpff functions, which treats ellipse, parabola and hyperbola alike.
The per-conic closed forms (eccentric anomaly, hyperbolic anomaly,
Barker's cubic, cycloid) are kept as ``method="closed"`` for
cross-checking.

Rectilinear orbits use the cycloid parameter u (u = 0 at a collision):

    H < 0:  r = a (1 - cos u),     t = a**1.5 (u - sin u),   a = -1/(2H)
    H = 0:  r = u**2 / 2,          t = u**3 / 6
    H > 0:  r = a (cosh u - 1),    t = a**1.5 (sinh u - u),  a = 1/(2H)

so collisions are ordinary interior points of the parametrization.
"""
import math

import numpy as np

from . import kernels
from .conic import (ConicOrbit, KeplerianArc, RectilinearOrbit, StateVector, Vec2,
                    rectilinear_phase, rectilinear_time)
from .errors import CollisionError, NonConvergenceError, NonperiodicError

TWO_PI = 2.0 * math.pi


def solve_kepler_elliptic(mean_anomaly, e):
    """Eccentric anomaly u with u - e sin u = M, for 0 <= e <= 1."""
    try:
        return kernels.kepler_elliptic(float(mean_anomaly), float(e))
    except kernels.KernelConvergenceError as exc:
        raise NonConvergenceError(str(exc)) from None


def solve_kepler_hyperbolic(mean_anomaly, e):
    """Hyperbolic anomaly w with e sinh w - w = M, for e > 1."""
    if not e > 1.0:
        raise ValueError("hyperbolic Kepler equation needs e > 1")
    try:
        return kernels.kepler_hyperbolic(float(mean_anomaly), float(e))
    except kernels.KernelConvergenceError as exc:
        raise NonConvergenceError(str(exc)) from None


def period(H):
    if H >= 0.0:
        raise NonperiodicError("nonperiodic orbit (H >= 0)")
    return TWO_PI * (-2.0 * H) ** -1.5


# ---------------------------------------------------------------------------
# rectilinear motion

def _rect_scale(H):
    if H == 0.0:
        return 1.0
    return math.sqrt(0.5 / abs(H))


def rectilinear_radius(H, u):
    if H < 0.0:
        h = math.sin(0.5 * u)
        return -1.0 / H * h * h
    if H == 0.0:
        return 0.5 * u * u
    h = math.sinh(0.5 * u)
    return h * h / H


def rectilinear_rdot(H, u):
    """Radial speed; infinite (signed) at a collision."""
    k = _rect_scale(H)
    if H < 0.0:
        s = math.sin(0.5 * u)
        if s == 0.0:
            return math.copysign(math.inf, math.cos(0.5 * u))
        return math.cos(0.5 * u) / s / k
    if H == 0.0:
        return math.copysign(math.inf, u) if u == 0.0 else 2.0 / u
    s = math.sinh(0.5 * u)
    return math.copysign(math.inf, u) if s == 0.0 else math.cosh(0.5 * u) / s / k


def _rect_sigma(H, u):
    # r * rdot, finite through the collision
    k = _rect_scale(H)
    if H < 0.0:
        return k * math.sin(u)
    if H == 0.0:
        return u
    return k * math.sinh(u)


def is_collision(orbit, u):
    if orbit.H < 0.0:
        return math.remainder(u, TWO_PI) == 0.0
    return u == 0.0


def rectilinear_position(orbit, t):
    """(r, outward) at epoch t; outward is +1 or -1 (sign of the radial speed
    just after t; +1 at a collision)."""
    H = orbit.H
    dt = t - orbit.t_ref
    if H < 0.0:
        k = _rect_scale(H)
        u = solve_kepler_elliptic(dt / (k ** 3), 1.0)
    elif H == 0.0:
        u = math.copysign(abs(6.0 * dt) ** (1.0 / 3.0), dt)
    else:
        k = _rect_scale(H)
        try:
            u = kernels.kepler_hyperbolic(dt / (k ** 3), 1.0)
        except kernels.KernelConvergenceError as exc:
            raise NonConvergenceError(str(exc)) from None
    r = rectilinear_radius(H, u)
    if H < 0.0:
        outward = 1 if u % TWO_PI < math.pi else -1
    else:
        outward = 1 if u >= 0.0 else -1
    return r, outward


# ---------------------------------------------------------------------------
# states and elapsed time

def state_at(orbit, s):
    """State at native anomaly s (epoch included)."""
    if isinstance(orbit, RectilinearOrbit):
        if is_collision(orbit, s):
            raise CollisionError("velocity undefined at collision")
        H = orbit.H
        r = rectilinear_radius(H, s)
        rdot = rectilinear_rdot(H, s)
        return StateVector(orbit.ray * r, orbit.ray * rdot,
                           orbit.t_ref + rectilinear_time(H, s))
    x, y, vx, vy, tau = kernels.conic_state(*orbit.kernel_args(), float(s))
    return StateVector(Vec2(x, y), Vec2(vx, vy), orbit.t_peri + tau)


def position_at(orbit, s):
    """Position at anomaly s; defined at collisions too."""
    if isinstance(orbit, RectilinearOrbit):
        return orbit.ray * rectilinear_radius(orbit.H, s)
    x, y, _, _, _ = kernels.conic_state(*orbit.kernel_args(), float(s))
    return Vec2(x, y)


def epoch_at(orbit, s):
    if isinstance(orbit, RectilinearOrbit):
        return orbit.t_ref + rectilinear_time(orbit.H, s)
    return orbit.t_peri + kernels.conic_state(*orbit.kernel_args(), float(s))[4]


def arc_endpoints(arc):
    return position_at(arc.orbit, arc.s_A), position_at(arc.orbit, arc.s_B)


def anomaly_scale(orbit):
    """k with dt = k r ds for the native anomaly s."""
    if isinstance(orbit, RectilinearOrbit):
        return _rect_scale(orbit.H)
    return kernels.conic_scale(orbit.conic.gamma, orbit.conic.e2m1)


def radius_array(orbit, s):
    """Vectorized radius r(s) for quadrature."""
    s = np.asarray(s, dtype=float)
    if isinstance(orbit, RectilinearOrbit):
        H = orbit.H
        if H < 0.0:
            return -1.0 / H * np.sin(0.5 * s) ** 2
        if H == 0.0:
            return 0.5 * s * s
        return np.sinh(0.5 * s) ** 2 / H
    c = orbit.conic
    e = c.eccentricity
    rp = c.gamma / (1.0 + e)
    if c.e2m1 < 0.0:
        a = -c.gamma / c.e2m1
        return rp + 2.0 * a * e * np.sin(0.5 * s) ** 2
    if c.e2m1 > 0.0:
        a = c.gamma / c.e2m1
        return rp + 2.0 * a * e * np.sinh(0.5 * s) ** 2
    return 0.5 * c.gamma * (1.0 + s * s)


def time_of_flight(arc, method="universal"):
    """Elapsed time t_B - t_A > 0 along the arc.

    ``method="universal"`` (default) uses Stumpff functions;
    ``method="closed"`` differences the per-conic time laws.
    """
    orbit = arc.orbit
    if method == "closed":
        return epoch_at(orbit, arc.s_B) - epoch_at(orbit, arc.s_A)
    if method != "universal":
        raise ValueError(f"unknown method {method!r}")
    if isinstance(orbit, RectilinearOrbit):
        H = orbit.H
        k = _rect_scale(H)
        r0 = rectilinear_radius(H, arc.s_A)
        dt, amp = kernels.universal_tof_split(r0, _rect_sigma(H, arc.s_A), -2.0 * H,
                                              k * (arc.s_B - arc.s_A))
        # collision-referenced form: t(u) = chi**3 c3
        ta = kernels.universal_tof(0.0, 0.0, -2.0 * H, k * arc.s_A)
        tb = kernels.universal_tof(0.0, 0.0, -2.0 * H, k * arc.s_B)
        return tb - ta if abs(ta) + abs(tb) < amp else dt
    return kernels.conic_tof(*orbit.kernel_args(), arc.s_A, arc.s_B)


def arc_from_states(orbit, s_A, s_B):
    return KeplerianArc(orbit, float(s_A), float(s_B))


def conic_arc(conic, orientation, s_A, s_B, t_A=0.0):
    """Arc on a conic with the epoch chosen so that t(s_A) = t_A."""
    args = (conic.alpha, conic.beta, conic.gamma, conic.e2m1, float(orientation))
    tau = kernels.conic_state(*args, float(s_A))[4]
    return KeplerianArc(ConicOrbit(conic, orientation, t_A - tau), float(s_A), float(s_B))


def rectilinear_arc(ray, H, u_A, u_B, t_A=0.0):
    return KeplerianArc(RectilinearOrbit(ray, H, t_A - rectilinear_time(H, u_A)),
                        float(u_A), float(u_B))


def rectilinear_arc_by_class(ray, H, r_A, r_B, indirect_O, indirect_F, revolutions=0):
    """Sub-period rectilinear arc from r_A to r_B on ``ray`` with the given
    collision (indirect_O) and culmination (indirect_F) behaviour."""
    from .errors import InfeasibleError
    if r_A < 0.0 or r_B < 0.0:
        raise ValueError("radii must be nonnegative")
    if H >= 0.0 and indirect_F:
        raise InfeasibleError("no culmination when H >= 0")
    if H >= 0.0 and revolutions:
        raise InfeasibleError("unbounded rectilinear orbit has no revolutions")
    if H < 0.0 and max(r_A, r_B) > -1.0 / H * (1.0 + 1e-14):
        raise InfeasibleError("radius beyond culmination for this energy")
    uA = abs(rectilinear_phase(H, r_A, 1.0))
    uB = abs(rectilinear_phase(H, r_B, 1.0))
    if not indirect_O and not indirect_F:
        if r_A == r_B:
            raise ValueError("coinciding endpoints")
        if r_A < r_B:
            u0, u1 = uA, uB
        elif H < 0.0:
            u0, u1 = TWO_PI - uA, TWO_PI - uB
        else:
            u0, u1 = -uA, -uB
    elif indirect_O and not indirect_F:
        u0, u1 = -uA, uB
    elif indirect_F and not indirect_O:
        u0, u1 = uA, TWO_PI - uB
    elif r_A < r_B:
        u0, u1 = -uA, TWO_PI - uB
    else:
        u0, u1 = uA, TWO_PI + uB
    return rectilinear_arc(ray, H, u0, u1 + TWO_PI * revolutions)
