"""Conic sections under affine maps that fix a line.

A branch r = E.p + gamma is the zero set of the quadratic form

    p^T (I - E E^T) p - 2 gamma E.p - gamma**2

and its image under p' = m p + t is again a conic, whose foci and
semiparameter are recovered here from the transformed form.  This gives
an independent way to check which maps fixing a line D send a conic with
a focus on D to a conic with a focus on D.
"""
import math
from dataclasses import dataclass

import numpy as np

from .conic import Vec2
from .cycle import AffineMap2D
from .errors import DegenerateError


@dataclass(frozen=True)
class QuadraticConic:
    """p^T A p + 2 b.p + c = 0, with the kind carried along (affine maps
    preserve it, and rank detection on a rounded matrix is unreliable)."""
    A: np.ndarray
    b: np.ndarray
    c: float
    kind: str


@dataclass(frozen=True)
class FocalData:
    foci: tuple          # one focus for a parabola
    semiparameter: float
    axis: Vec2           # unit direction of the focal axis
    semimajor: float     # nan for a parabola


def quadric_of(conic):
    E = np.array([conic.alpha, conic.beta])
    g = conic.gamma
    return QuadraticConic(np.eye(2) - np.outer(E, E), -g * E, -g * g, conic.kind)


def transform_quadric(q, amap):
    """Image of the conic under p' = m p + t."""
    mi = np.linalg.inv(amap.matrix)
    t = np.asarray(amap.b)
    # p = mi (p' - t)
    A = mi.T @ q.A @ mi
    u = -mi @ t
    b = mi.T @ (q.A @ u + q.b)
    c = float(u @ q.A @ u + 2.0 * q.b @ u + q.c)
    return QuadraticConic(A, b, c, q.kind)


def focal_data(q):
    """Foci, semiparameter, focal axis and semimajor axis of a conic."""
    if q.kind == "parabola":
        w, V = np.linalg.eigh(q.A)
        i = int(np.argmax(np.abs(w)))
        lam = w[i]
        u = V[:, i]
        axis = V[:, 1 - i]
        bu, bw = float(q.b @ u), float(q.b @ axis)
        if bw == 0.0:
            raise DegenerateError("degenerate parabola")
        s0 = -bu / lam
        t0 = -(q.c - bu * bu / lam) / (2.0 * bw)
        f = abs(bw / (2.0 * lam))
        opening = -math.copysign(1.0, lam * bw)
        vertex = s0 * u + t0 * axis
        focus = vertex + opening * f * axis
        return FocalData((Vec2(*focus),), 2.0 * f, Vec2(*(opening * axis)), math.nan)
    centre = -np.linalg.solve(q.A, q.b)
    k = q.c + float(q.b @ centre)
    w, V = np.linalg.eigh(q.A)
    r = -k / w
    if q.kind == "ellipse":
        i = int(np.argmax(r))
        a2, b2 = r[i], r[1 - i]
        ecc_dist = math.sqrt(max(a2 - b2, 0.0))
    else:
        i = int(np.argmax(r))   # the positive one is the transverse axis
        a2, b2 = r[i], -r[1 - i]
        ecc_dist = math.sqrt(a2 + b2)
    axis = V[:, i]
    a = math.sqrt(a2)
    foci = (Vec2(*(centre + ecc_dist * axis)), Vec2(*(centre - ecc_dist * axis)))
    return FocalData(foci, b2 / a, Vec2(*axis), a)


def chord_length(q, point, direction):
    """Length of the chord of the conic along the line point + s direction
    (nan when the line misses it)."""
    p = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    qa = float(d @ q.A @ d)
    qb = float(d @ q.A @ p + q.b @ d)
    qc = float(p @ q.A @ p + 2.0 * q.b @ p + q.c)
    disc = qb * qb - qa * qc
    if disc < 0.0 or qa == 0.0:
        return math.nan
    return 2.0 * math.sqrt(disc) / abs(qa)


# ---------------------------------------------------------------------------
# focal chord, central chord and major axis

def geometric_progression_check(conic, direction=(1.0, 0.0)):
    """(f, g, h) for an ellipse and a chord direction: the focal chord through
    O, the parallel chord through the centre and the major axis.  g**2 = f h.

    Evaluated with the discriminant of the branch equation as a quadratic in
    x, in a frame where the direction is the x-axis.
    """
    if conic.e2m1 >= 0.0:
        raise ValueError("ellipse required")
    d = Vec2(*direction).unit()
    al = conic.rotated(d.x, -d.y)
    one_m_a2 = (1.0 - al.alpha) * (1.0 + al.alpha)
    a = -al.gamma / conic.e2m1

    def delta(y):
        return (al.alpha ** 2 - 1.0) * y * y + (al.beta * y + al.gamma) ** 2

    f = 2.0 * math.sqrt(delta(0.0)) / one_m_a2
    g = 2.0 * math.sqrt(delta(al.beta * a)) / one_m_a2
    return f, g, 2.0 * a


# ---------------------------------------------------------------------------
# maps fixing a line

def shear_fixing_x_axis(k, J):
    """(x, y) -> (x + k y, J y): fixes the x-axis pointwise, determinant J."""
    if J == 0.0:
        raise ValueError("J must be nonzero")
    return AffineMap2D(((1.0, k), (0.0, J)))


def family_map(M, phi_from, phi_to):
    """Linear part of the map carrying the family member at phi_from to the one
    at phi_to (fixes the x-axis, determinant sin(phi_to)/sin(phi_from))."""
    s1 = math.sin(phi_from)
    return shear_fixing_x_axis(M * (math.cos(phi_to) - math.cos(phi_from)) / s1,
                               math.sin(phi_to) / s1)


def fixes_line(amap, point, direction, tol=1e-12):
    p = Vec2(*point)
    d = Vec2(*direction)
    scale = max(1.0, p.norm(), d.norm())
    e1 = (amap(p) - p).norm()
    e2 = (amap(p + d) - (p + d)).norm()
    return max(e1, e2) <= tol * scale


@dataclass(frozen=True)
class FocusPropertyVerdict:
    semiparameter_scaled: bool   # image semiparameter equals J**2 gamma
    focus_on_line: bool          # image has a focus on D, at infinity for a parabola
    semiparameter_error: float
    focus_distance: float
    triad: tuple = None          # chord_triad along D, ellipses only

    @property
    def equivalent(self):
        return self.semiparameter_scaled == self.focus_on_line

    @property
    def triad_consistent(self):
        """Never exactly two of the three chord properties."""
        return self.triad is None or sum(self.triad) != 2


def affine_focus_property_check(conic, amap, direction=(1.0, 0.0), tol=1e-10):
    """Semiparameter test and focus test for the image of ``conic`` (focus O)
    under a map fixing the line D through O along ``direction``.

    The two must agree.  For ellipses the chord triad along D is attached.
    """
    d = Vec2(*direction).unit()
    if not fixes_line(amap, (0.0, 0.0), d):
        raise ValueError("map must fix the line pointwise")
    q1 = transform_quadric(quadric_of(conic), amap)
    fd = focal_data(q1)
    J = amap.det
    target = J * J * conic.gamma
    sp_err = abs(fd.semiparameter - target) / target
    if q1.kind == "parabola":
        # the focus at infinity counts too: axis parallel to D
        dist = min(abs(fd.foci[0].cross(d)) / max(1.0, fd.semiparameter),
                   abs(fd.axis.cross(d)))
    else:
        dist = min(abs(F.cross(d)) for F in fd.foci) / max(1.0, fd.semimajor)
    triad = chord_triad(conic, amap, d, tol) if conic.kind == "ellipse" else None
    return FocusPropertyVerdict(bool(sp_err <= tol), bool(dist <= tol), sp_err, dist, triad)


def chord_triad(conic, amap, direction, tol=1e-10):
    """For an ellipse, an affine map and a chord direction, the three flags

        focal chord along the direction goes to a focal chord (by length),
        chord lengths along the direction are preserved,
        major axis length is preserved.
    """
    if conic.kind != "ellipse":
        raise ValueError("ellipse required")
    d = np.asarray(Vec2(*direction).unit())
    q0 = quadric_of(conic)
    q1 = transform_quadric(q0, amap)
    md = amap.matrix @ d
    lam = float(np.linalg.norm(md))
    f0 = chord_length(q0, (0.0, 0.0), d)
    fd1 = focal_data(q1)
    f1 = chord_length(q1, fd1.foci[0], md)
    h0 = -2.0 * conic.gamma / conic.e2m1
    h1 = 2.0 * fd1.semimajor
    return (bool(abs(lam * f0 - f1) <= tol * f1),
            bool(abs(lam - 1.0) <= tol),
            bool(abs(h1 - h0) <= tol * h0))


def rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return AffineMap2D(((c, -s), (s, c)))
