"""Planar vectors, states and unifocal conics.

Canonical units throughout: gravitational parameter 1.  A nonrectilinear
branch with focus at the origin is written ``r = alpha*x + beta*y + gamma``;
(alpha, beta) is the eccentricity vector and gamma = C**2 the
semiparameter.
"""
import math
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Optional, Union

from . import kernels
from .errors import ParabolicError


class Vec2(tuple):
    """Immutable planar vector with finite components."""

    __slots__ = ()

    def __new__(cls, x, y):
        x = float(x)
        y = float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"non-finite vector component ({x}, {y})")
        return tuple.__new__(cls, (x, y))

    def __getnewargs__(self):
        return (self[0], self[1])

    x = property(itemgetter(0))
    y = property(itemgetter(1))

    def __add__(self, other):
        return Vec2(self[0] + other[0], self[1] + other[1])

    def __sub__(self, other):
        return Vec2(self[0] - other[0], self[1] - other[1])

    def __neg__(self):
        return Vec2(-self[0], -self[1])

    def __mul__(self, k):
        return Vec2(self[0] * k, self[1] * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return Vec2(self[0] / k, self[1] / k)

    def dot(self, other):
        return self[0] * other[0] + self[1] * other[1]

    def cross(self, other):
        return self[0] * other[1] - self[1] * other[0]

    def norm(self):
        return math.hypot(self[0], self[1])

    def unit(self):
        n = self.norm()
        if n == 0.0:
            raise ValueError("zero vector has no direction")
        return Vec2(self[0] / n, self[1] / n)

    def rotated(self, c, s):
        """Rotate by the angle with cosine ``c`` and sine ``s``."""
        return Vec2(c * self[0] - s * self[1], s * self[0] + c * self[1])

    def __repr__(self):
        return f"Vec2({self[0]!r}, {self[1]!r})"


@dataclass(frozen=True)
class StateVector:
    q: Vec2
    v: Vec2
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", Vec2(*self.q))
        object.__setattr__(self, "v", Vec2(*self.v))
        object.__setattr__(self, "t", float(self.t))
        if self.q.norm() == 0.0:
            raise ValueError("state at the origin: collisions belong to rectilinear orbits")

    @property
    def r(self):
        return self.q.norm()


@dataclass(frozen=True)
class UnifocalConic:
    """Branch r = alpha x + beta y + gamma, gamma > 0.

    ``e2m1`` caches alpha**2 + beta**2 - 1.  Constructors that know it
    more accurately than the rounded (alpha, beta) (for instance 2*H*gamma)
    pass it in; otherwise it is computed.  The branch is a parabola only
    when ``e2m1 == 0`` exactly.
    """
    alpha: float
    beta: float
    gamma: float
    e2m1: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"non-finite {name}")
            object.__setattr__(self, name, val)
        if not self.gamma > 0.0:
            raise ValueError("semiparameter gamma must be > 0")
        if self.e2m1 is None:
            object.__setattr__(self, "e2m1", self.alpha ** 2 + self.beta ** 2 - 1.0)
        else:
            object.__setattr__(self, "e2m1", float(self.e2m1))

    @property
    def E(self):
        return Vec2(self.alpha, self.beta)

    @property
    def eccentricity(self):
        return math.sqrt(1.0 + self.e2m1)

    @property
    def kind(self):
        if self.e2m1 < 0.0:
            return "ellipse"
        if self.e2m1 > 0.0:
            return "hyperbola"
        return "parabola"

    @property
    def energy(self):
        """H = (e**2 - 1) / (2 gamma)."""
        return self.e2m1 / (2.0 * self.gamma)

    def rotated(self, c, s):
        a, b = Vec2(self.alpha, self.beta).rotated(c, s)
        return UnifocalConic(a, b, self.gamma, self.e2m1)

    def reflected(self):
        """Mirror image in the x-axis."""
        return UnifocalConic(self.alpha, -self.beta, self.gamma, self.e2m1)


@dataclass(frozen=True)
class ConicOrbit:
    conic: UnifocalConic
    orientation: int
    t_peri: float = 0.0

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def C(self):
        return self.orientation * math.sqrt(self.conic.gamma)

    @property
    def H(self):
        return self.conic.energy

    def kernel_args(self):
        c = self.conic
        return (c.alpha, c.beta, c.gamma, c.e2m1, float(self.orientation))


@dataclass(frozen=True)
class RectilinearOrbit:
    """Radial motion on a ray, continued through collisions.

    The phase is the cycloid parameter u with u = 0 at the collision
    passing at ``t_ref``.
    """
    ray: Vec2
    H: float
    t_ref: float = 0.0

    def __post_init__(self):
        ray = Vec2(*self.ray)
        if abs(ray.norm() - 1.0) > 1e-12:
            raise ValueError("ray must be a unit vector")
        object.__setattr__(self, "ray", ray)
        object.__setattr__(self, "H", float(self.H))


Orbit = Union[ConicOrbit, RectilinearOrbit]


@dataclass(frozen=True)
class KeplerianArc:
    """An orbit restricted to the anomaly interval [s_A, s_B]."""
    orbit: Orbit
    s_A: float
    s_B: float

    def __post_init__(self):
        if not self.s_B > self.s_A:
            raise ValueError("arc needs s_B > s_A")

    @property
    def rectilinear(self):
        return isinstance(self.orbit, RectilinearOrbit)

    @property
    def H(self):
        return self.orbit.H

    @property
    def revolutions(self):
        """Completed full turns (ellipses and bounded rectilinear orbits)."""
        if self.orbit.H >= 0.0:
            return 0
        return int(math.floor((self.s_B - self.s_A) / (2.0 * math.pi)))


# ---------------------------------------------------------------------------
# conserved quantities

def angular_momentum(state):
    q, v = state.q, state.v
    return q.x * v.y - q.y * v.x


def eccentricity_vector(state):
    """E = (x/r - vy C, y/r + vx C); points away from the pericenter."""
    q, v = state.q, state.v
    r = q.norm()
    C = angular_momentum(state)
    return Vec2(q.x / r - v.y * C, q.y / r + v.x * C)


def energy(state):
    v = state.v
    return 0.5 * (v.x * v.x + v.y * v.y) - 1.0 / state.q.norm()


def semimajor_axis(H):
    if H == 0.0:
        raise ParabolicError("parabolic: semimajor axis undefined")
    return -1.0 / (2.0 * H)


def second_focus(conic, H=None):
    """F = 2 a E; raises for parabolas (focus at infinity along E)."""
    if H is None:
        H = conic.energy
    if H == 0.0 or conic.e2m1 == 0.0:
        raise ParabolicError(
            f"parabola: second focus at infinity, direction = ({conic.alpha}, {conic.beta})")
    a = semimajor_axis(H)
    return Vec2(2.0 * a * conic.alpha, 2.0 * a * conic.beta)


def unifocal_residual(conic, p):
    p = Vec2(*p)
    return p.norm() - (conic.alpha * p.x + conic.beta * p.y + conic.gamma)


def on_branch(conic, p, tol=1e-12):
    """Residual small and the right-hand side positive (excludes the far
    branch of a hyperbola)."""
    p = Vec2(*p)
    rhs = conic.alpha * p.x + conic.beta * p.y + conic.gamma
    return rhs > 0.0 and abs(p.norm() - rhs) <= tol * (1.0 + p.norm())


# ---------------------------------------------------------------------------
# orbits from states

def rectilinear_phase(H, r, rdot):
    """Cycloid parameter u >= 0 side chosen by the sign of the radial speed."""
    if H < 0.0:
        a = -0.5 / H
        u = 2.0 * math.asin(min(1.0, math.sqrt(r / (2.0 * a))))
        return u if rdot >= 0.0 else 2.0 * math.pi - u
    if H == 0.0:
        u = math.sqrt(2.0 * r)
    else:
        u = 2.0 * math.asinh(math.sqrt(r * H))
    return u if rdot >= 0.0 else -u


def rectilinear_time(H, u):
    """Time since collision at cycloid parameter u."""
    if H < 0.0:
        a = -0.5 / H
        return a * math.sqrt(a) * kernels.u_minus_sin(u)
    if H == 0.0:
        return u ** 3 / 6.0
    a = 0.5 / H
    return a * math.sqrt(a) * kernels.sinh_minus(u)


def orbit_from_state(state):
    C = angular_momentum(state)
    H = energy(state)
    if C == 0.0:
        r = state.r
        ray = state.q / r
        rdot = state.v.dot(ray)
        u = rectilinear_phase(H, r, rdot)
        return RectilinearOrbit(ray, H, state.t - rectilinear_time(H, u))
    E = eccentricity_vector(state)
    gamma = C * C
    conic = UnifocalConic(E.x, E.y, gamma, 2.0 * H * gamma)
    orient = 1 if C > 0.0 else -1
    args = (conic.alpha, conic.beta, gamma, conic.e2m1, float(orient))
    s = kernels.conic_anomaly(*args, state.q.x, state.q.y)
    tau = kernels.conic_state(*args, s)[4]
    return ConicOrbit(conic, orient, state.t - tau)


def anomaly_of_state(orbit, state):
    """Native anomaly of a state known to lie on ``orbit``."""
    if isinstance(orbit, RectilinearOrbit):
        return rectilinear_phase(orbit.H, state.r, state.v.dot(orbit.ray))
    return kernels.conic_anomaly(*orbit.kernel_args(), state.q.x, state.q.y)
