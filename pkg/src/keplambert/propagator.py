"""Numeric oracle: adaptive 8(5,3) Runge-Kutta integration of Newton's system.

Independent of the analytic time laws; used to cross-check them.  Close
approaches switch to Sundman time (dt = r ds) per step; true collisions
are refused, the rectilinear extension in ``kepler`` being authoritative
there.
"""
import math
from dataclasses import dataclass

from . import kernels
from .conic import StateVector, Vec2, angular_momentum, energy
from .errors import CollisionError, NonConvergenceError, VerificationError

COLLISION_RADIUS = 1e-8
GUARD_FRACTION = 0.01
MAX_STEPS = 5_000_000
# local error target relative to the requested tolerance; keeps the global
# energy drift over many periods below 100 * tol
LOCAL_TOL_FACTOR = 0.01


@dataclass(frozen=True)
class PropagationResult:
    final: StateVector
    steps: int
    max_energy_drift: float
    min_radius: float
    area: float = 0.0
    action: float = 0.0


def guard_radius(state):
    """Radius below which steps use Sundman time: 1% of the orbit's length
    scale (|a|, capped at ten times the current radius)."""
    r = state.r
    H = energy(state)
    L = r if H == 0.0 else min(0.5 / abs(H), 10.0 * r)
    return GUARD_FRACTION * L


def propagate(initial, dt, tol=1e-12):
    """State at initial.t + dt, plus diagnostics.

    ``area`` is the integral of (x vy - y vx)/2 and ``action`` the integral
    of |v|**2 over the run.
    """
    if not dt > 0.0:
        raise ValueError("dt must be > 0")
    if not 1e-14 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-14, 1e-6]")
    q, v = initial.q, initial.v
    out = kernels.propagate(q.x, q.y, v.x, v.y, initial.t, float(dt), LOCAL_TOL_FACTOR * float(tol),
                            guard_radius(initial), COLLISION_RADIUS, MAX_STEPS)
    x, y, vx, vy, t, area, action, steps, drift, rmin, status = out
    if status == kernels.STATUS_COLLISION:
        raise CollisionError("collision encountered: use rectilinear analytic extension")
    if status == kernels.STATUS_MAX_STEPS:
        raise NonConvergenceError("step budget exhausted")
    return PropagationResult(StateVector(Vec2(x, y), Vec2(vx, vy), t), int(steps),
                             drift, rmin, area, action)


def propagate_backward(initial, dt, tol=1e-12):
    """Integrate to initial.t - dt using time-reversal symmetry."""
    rev = StateVector(initial.q, -initial.v, -initial.t)
    res = propagate(rev, dt, tol)
    f = res.final
    return PropagationResult(StateVector(f.q, -f.v, -f.t), res.steps,
                             res.max_energy_drift, res.min_radius, -res.area, -res.action)


def sweep_area(initial, dt, tol=1e-12, check=True):
    """Area swept by the radius vector, C dt / 2.

    With ``check`` the value is compared with the integrated areal rate
    from the propagator.
    """
    C = angular_momentum(initial)
    if C == 0.0:
        raise ValueError("rectilinear: swept area is zero")
    area = 0.5 * C * dt
    if check:
        quad = propagate(initial, dt, tol).area
        if abs(quad - area) > 1e3 * tol * max(1.0, abs(area)):
            raise VerificationError(f"swept area mismatch: {area} vs {quad}")
    return area
