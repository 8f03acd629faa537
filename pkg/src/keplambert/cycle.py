"""Families of arcs with equal chord, radii sum and energy.

Work in a frame where the chord is horizontal and runs towards +x.  A
branch r = alpha x + beta y + gamma with alpha = cos(phi) is the image
of the vertical branch

    Sigma:  r = M y + N,      M = beta / sin(phi),  N = gamma / sin(phi)**2

under the map (x, y) -> (x + cos(phi) (M y + N), y sin(phi)).  Horizontal
chords of Sigma are symmetric about the y-axis, so every image chord has
the same length and the same radii sum; the energy (M**2 - 1) / (2 N) does
not depend on phi either.  Letting phi run over (0, pi), reflecting in the
x-axis for negative phi and closing the loop with the two radial limits at
phi = 0 and phi = +-pi gives a closed family of arcs, all with the same
elapsed time.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .conic import KeplerianArc, UnifocalConic, Vec2, angular_momentum, energy
from .errors import DegenerateError, InfeasibleError, NonConvergenceError, RectilinearFamilyError
from .geometry import (ArcClass, ChordConfig, _check_admissible, classify_arc, frame_align,
                       gauss_rescaled)
from .kepler import (TWO_PI, arc_endpoints, conic_arc, rectilinear_arc_by_class, state_at,
                     time_of_flight)

PHI_MIN = 1e-3


@dataclass(frozen=True)
class AffineMap2D:
    """p -> m p + b."""
    m: tuple
    b: Vec2 = Vec2(0.0, 0.0)

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float).reshape(2, 2)
        object.__setattr__(self, "m", tuple(map(tuple, m)))
        object.__setattr__(self, "b", Vec2(*self.b))

    @property
    def matrix(self):
        return np.array(self.m)

    @property
    def det(self):
        (a, b), (c, d) = self.m
        return a * d - b * c

    def __call__(self, p):
        (a, b), (c, d) = self.m
        x, y = p
        return Vec2(a * x + b * y + self.b.x, c * x + d * y + self.b.y)

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        return pts @ self.matrix.T + np.asarray(self.b)

    def inverse(self):
        (a, b), (c, d) = self.m
        det = self.det
        if det == 0.0:
            raise DegenerateError("singular affine map")
        mi = ((d / det, -b / det), (-c / det, a / det))
        bx, by = self.b
        return AffineMap2D(mi, Vec2(-(mi[0][0] * bx + mi[0][1] * by),
                                    -(mi[1][0] * bx + mi[1][1] * by)))

    def compose(self, other):
        """self o other."""
        m = self.matrix @ other.matrix
        b = self.matrix @ np.asarray(other.b) + np.asarray(self.b)
        return AffineMap2D(m, Vec2(*b))

    def linear(self):
        return AffineMap2D(self.m)


def affine_map_o12(phi, M, N):
    """Map sending Sigma: r = M y + N onto r = x cos(phi) + y M sin(phi) + N sin(phi)**2.

    The determinant is sin(phi); the inverse takes the image branch back
    to Sigma.
    """
    if not 0.0 < phi < math.pi:
        raise ValueError("phi must lie in (0, pi)")
    c, s = math.cos(phi), math.sin(phi)
    return AffineMap2D(((1.0, M * c), (0.0, s)), Vec2(N * c, 0.0))


def normalize_to_vertical(conic):
    """(phi, M, N) of a branch given in a frame where it has a horizontal chord."""
    a = conic.alpha
    if not -1.0 < a < 1.0:
        raise ValueError("a branch with a horizontal chord has |alpha| < 1")
    s = math.sqrt((1.0 - a) * (1.0 + a))
    return math.atan2(s, a), conic.beta / s, conic.gamma / (s * s)


@dataclass(frozen=True)
class LambertCycle:
    """Constants of a family plus the frame it lives in.

    ``rho + M sigma = N`` holds up to rounding; ``rho`` comes from the radii
    and ``N`` from the semiparameter so the residual is a real check.
    """
    M: float
    N: float
    rho: float
    sigma: float
    phi_gamma: float
    y_level: float
    half_chord: float
    H: float
    orientation: int
    revolutions: int
    frame_c: float
    frame_s: float
    arc_class: ArcClass = field(compare=False, default=None)

    @property
    def compatibility_residual(self):
        return abs(self.rho + self.M * self.sigma - self.N) / max(abs(self.N), abs(self.rho))

    @property
    def degenerate(self):
        """Flat family: O lies on every chord and the radial limits start at O."""
        return self.y_level == 0.0

    @property
    def chord(self):
        return 2.0 * self.half_chord

    @property
    def radii_sum(self):
        return 2.0 * self.rho

    def to_world(self, p):
        return Vec2(*p).rotated(self.frame_c, -self.frame_s)

    def endpoints_aligned(self, phi):
        """Images of the Sigma chord ends (-+half_chord, y_level) under the map at phi."""
        c, s = math.cos(phi), math.sin(phi)
        shift = c * (self.M * self.y_level + self.N)
        return (Vec2(-self.half_chord + shift, self.y_level * s),
                Vec2(self.half_chord + shift, self.y_level * s))

    def conic_aligned(self, phi):
        s = math.sin(phi)
        gamma = self.N * s * s
        return UnifocalConic(math.cos(phi), self.M * s, gamma, 2.0 * self.H * gamma)


def _sub_revolution(arc):
    revs = arc.revolutions
    if revs == 0:
        return arc
    return KeplerianArc(arc.orbit, arc.s_A, arc.s_B - TWO_PI * revs)


def arc_class_of(arc):
    """Class of the arc with complete turns removed."""
    return classify_arc(_sub_revolution(arc))


def cycle_from_arc(arc):
    if arc.rectilinear:
        raise RectilinearFamilyError("rectilinear arcs are cycle limits, not seeds")
    A, B = arc_endpoints(arc)
    cfg = ChordConfig(A, B)
    _check_admissible(cfg)
    fr = frame_align(A, B)
    aligned = arc.orbit.conic.rotated(fr.c, fr.s)
    s = fr.sin_phi
    phi = math.atan2(s, fr.alpha)
    M = aligned.beta / s
    N = aligned.gamma / (s * s)
    y_level = fr.y0 / s
    return LambertCycle(M=M, N=N, rho=0.5 * (fr.rA + fr.rB), sigma=-y_level,
                        phi_gamma=phi, y_level=y_level, half_chord=0.5 * fr.chord,
                        H=arc.orbit.H, orientation=arc.orbit.orientation,
                        revolutions=arc.revolutions, frame_c=fr.c, frame_s=fr.s,
                        arc_class=arc_class_of(arc))


def cycle_arc_at(cycle, phi):
    """Arc of the family at phi in (-pi, 0) u (0, pi), in the caller's frame."""
    if phi == 0.0 or not abs(phi) < math.pi:
        raise ValueError("phi must be nonzero with |phi| < pi; use rectilinear_limit")
    A, B = cycle.endpoints_aligned(phi)
    conic = cycle.conic_aligned(phi).rotated(cycle.frame_c, -cycle.frame_s)
    A, B = cycle.to_world(A), cycle.to_world(B)
    orient = cycle.orientation if phi > 0.0 else -cycle.orientation
    args = (conic.alpha, conic.beta, conic.gamma, conic.e2m1, float(orient))
    iv = kernels.arc_anomalies(*args, A.x, A.y, B.x, B.y, cycle.revolutions)
    if iv is None:
        raise InfeasibleError("image branch does not carry the arc")
    return conic_arc(conic, orient, iv[0], iv[1])


def rectilinear_limit(cycle, end):
    """Radial arc reached as phi -> 0+ (``"phi_to_0"``) or phi -> pi- (``"phi_to_pi"``)."""
    if end in ("phi_to_0", 0):
        ray = Vec2(1.0, 0.0)
        rA, rB = cycle.rho - cycle.half_chord, cycle.rho + cycle.half_chord
    elif end in ("phi_to_pi", "pi"):
        ray = Vec2(-1.0, 0.0)
        rA, rB = cycle.rho + cycle.half_chord, cycle.rho - cycle.half_chord
    else:
        raise ValueError(f"unknown limit {end!r}")
    if cycle.degenerate:
        # the endpoint at O is exact here
        rA, rB = max(rA, 0.0), max(rB, 0.0)
    cls = cycle.arc_class
    from .geometry import Winding
    return rectilinear_arc_by_class(cycle.to_world(ray), cycle.H, rA, rB,
                                    cls.about_O is Winding.INDIRECT,
                                    cls.about_F is Winding.INDIRECT,
                                    cycle.revolutions)


def sample_phis(samples, phi_min=PHI_MIN, refine=2):
    """Chebyshev points on [phi_min, pi - phi_min] plus geometric refinement
    towards both ends."""
    if samples < 8:
        raise ValueError("need at least 8 samples")
    k = np.arange(samples)
    mid, half = 0.5 * math.pi, 0.5 * math.pi - phi_min
    phis = list(mid - half * np.cos(np.pi * (k + 0.5) / samples))
    phis[0], phis[-1] = phi_min, math.pi - phi_min
    for j in range(1, refine + 1):
        small = phi_min * 10.0 ** -j
        phis += [small, math.pi - small]
    return sorted(phis)


def _rel(values, ref):
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values - ref)) / abs(ref)) if ref != 0.0 else \
        float(np.max(np.abs(values)))


@dataclass
class CycleReport:
    phis: list
    deviations: dict
    limit_dt_deviation: dict
    class_consistent: bool
    degenerate: bool
    rows: list

    def max(self, key):
        return self.deviations[key]


def _arc_quantities(arc, ends=None):
    A, B = arc_endpoints(arc)
    if ends is None:
        ends = (A, B)
    EA, EB = ends
    # energy and angular momentum at the farther end (no near-collision cancellation)
    st = state_at(arc.orbit, arc.s_A if A.norm() >= B.norm() else arc.s_B)
    return {
        "chord": (EB - EA).norm(),
        "radii_sum": EA.norm() + EB.norm(),
        "H": energy(st),
        "dt": time_of_flight(arc),
        # at the pericenter v is normal to q, so the cross product is well conditioned
        "C": angular_momentum(state_at(arc.orbit, 0.0)),
        "endpoint_error": max((A - EA).norm(), (B - EB).norm()) / (EA.norm() + EB.norm()),
    }


def _world_ends(cycle, phi):
    A, B = cycle.endpoints_aligned(phi)
    return cycle.to_world(A), cycle.to_world(B)


def cycle_invariant_report(cycle, samples=20, phi_min=PHI_MIN, refine=2, with_reflected=False):
    """Spread over sampled phi of chord, radii sum, H, dt, C/sin(phi) and
    swept area/sin(phi), plus the agreement of both radial limits with dt.

    Deviations are relative to the seed values; H is scaled by
    max(|H|, 1/rho) so that parabolic families are measured sensibly.
    ``endpoint_error`` is the largest distance between the mapped chord ends
    and the positions recomputed from the arc's anomalies.
    """
    phis = sample_phis(samples, phi_min, refine)
    if with_reflected:
        phis = phis + [-p for p in phis]
    pg = cycle.phi_gamma
    ref = _arc_quantities(cycle_arc_at(cycle, pg), _world_ends(cycle, pg))
    s_ref = math.sin(pg)
    ref_c = ref["C"] / s_ref
    ref_area = 0.5 * ref["C"] * ref["dt"] / s_ref
    rows = []
    same_class = True
    for phi in phis:
        arc = cycle_arc_at(cycle, phi)
        q = _arc_quantities(arc, _world_ends(cycle, phi))
        s = math.sin(phi)
        q["phi"] = phi
        q["C_over_sin"] = q["C"] / s
        q["area_over_sin"] = 0.5 * q["C"] * q["dt"] / s
        if cycle.arc_class is not None and arc_class_of(arc) != cycle.arc_class:
            same_class = False
        rows.append(q)
    h_scale = max(abs(cycle.H), 1.0 / cycle.rho)
    dev = {
        "chord": _rel([r["chord"] for r in rows], ref["chord"]),
        "radii_sum": _rel([r["radii_sum"] for r in rows], ref["radii_sum"]),
        "H": max(abs(r["H"] - cycle.H) for r in rows) / h_scale,
        "dt": _rel([r["dt"] for r in rows], ref["dt"]),
        "C_over_sin": _rel([r["C_over_sin"] for r in rows], ref_c),
        "area_over_sin": _rel([r["area_over_sin"] for r in rows], ref_area),
        "endpoint_error": max(r["endpoint_error"] for r in rows),
    }
    limits = {}
    for end in ("phi_to_0", "phi_to_pi"):
        try:
            limits[end] = abs(time_of_flight(rectilinear_limit(cycle, end)) - ref["dt"]) / ref["dt"]
        except (InfeasibleError, ValueError):
            limits[end] = math.nan
    return CycleReport(phis, dev, limits, same_class, cycle.degenerate, rows)


# ---------------------------------------------------------------------------
# continuation around the family

def _aligned_beta(cycle, conic):
    return conic.rotated(cycle.frame_c, cycle.frame_s).beta


class _Ambiguous(Exception):
    pass


def _track_step(cycle, phi, beta_pred, strict=False):
    """Branch of energy H through the endpoints at phi whose aligned beta is
    nearest the prediction, found from Gauss's construction (not from the
    family formula).  Raises _Ambiguous when the prediction does not clearly
    single out one root relative to the step just taken."""
    A, B = cycle.endpoints_aligned(phi)
    A, B = cycle.to_world(A), cycle.to_world(B)
    cands = gauss_rescaled(ChordConfig(A, B), cycle.H)
    if not cands:
        raise InfeasibleError("energy below the minimum for this chord")
    dist = sorted((abs(_aligned_beta(cycle, c) - beta_pred), i) for i, c in enumerate(cands))
    if strict and len(dist) == 2 and dist[1][0] < 10.0 * dist[0][0]:
        raise _Ambiguous
    best = cands[dist[0][1]]
    orient = cycle.orientation if phi > 0.0 else -cycle.orientation
    args = (best.alpha, best.beta, best.gamma, best.e2m1, float(orient))
    iv = kernels.arc_anomalies(*args, A.x, A.y, B.x, B.y, cycle.revolutions)
    if iv is None:
        raise InfeasibleError("tracked branch does not carry the arc")
    return conic_arc(best, orient, iv[0], iv[1])


def _arc_distance(a, b):
    ca, cb = a.orbit.conic, b.orbit.conic
    scale = max(1.0, ca.gamma)
    d = max(abs(ca.alpha - cb.alpha), abs(ca.beta - cb.beta), abs(ca.gamma - cb.gamma) / scale)
    Aa, Ba = arc_endpoints(a)
    Ab, Bb = arc_endpoints(b)
    r = max(Aa.norm(), Ba.norm())
    d = max(d, (Aa - Ab).norm() / r, (Ba - Bb).norm() / r)
    if a.orbit.orientation != b.orbit.orientation:
        d = math.inf
    return max(d, abs(time_of_flight(a) - time_of_flight(b)) / time_of_flight(b))


@dataclass
class ContinuationResult:
    closure_error: float
    max_tracking_error: float
    limit_gap: dict
    steps: int
    degenerate: bool


def _continuation_path(pg, steps_per_leg, phi_min):
    """Unwrapped angles from pg down to pg - 2 pi, uniform in the bulk and
    geometrically refined towards the radial limits at 0 and -pi."""
    step = 0.5 * math.pi / steps_per_leg
    pts = set(np.linspace(pg, pg - TWO_PI, 4 * steps_per_leg + 1)[1:].tolist())
    for lim in (0.0, -math.pi):
        d = phi_min
        while d < step:
            pts.update((lim + d, lim - d))
            d *= 2.0
    # tiny first step so the secant predictor has a history
    pts.add(pg - 1e-6 * step)
    keep = [u for u in pts if pg - TWO_PI <= u < pg
            and min(abs(u), abs(u + math.pi)) >= phi_min * (1.0 - 1e-12)]
    return sorted(keep, reverse=True)


def cycle_continuation(cycle, steps_per_leg=12, phi_min=PHI_MIN):
    """Follow the family once around by Gauss continuation at fixed energy.

    The angle is unwrapped: phi_gamma -> 0 -> -pi -> phi_gamma - 2 pi, skipping
    a window of half-width phi_min around each radial limit.  In this
    parametrization the aligned beta is continuous through both limits, so
    each step picks the Gauss root nearest a secant prediction of beta.
    ``closure_error`` compares the tracked arc on return with the seed arc.
    """
    pg = cycle.phi_gamma
    path = _continuation_path(pg, steps_per_leg, phi_min)
    seed = cycle_arc_at(cycle, pg)
    hist = [(pg, _aligned_beta(cycle, seed.orbit.conic))]
    worst = 0.0
    current = seed
    gaps = {}
    steps = 0
    todo = list(reversed(path))
    while todo:
        u = todo[-1]
        u_prev = hist[-1][0]
        if len(hist) > 1:
            (u1, b1), (u2, b2) = hist[-2], hist[-1]
            pred = b2 + (b2 - b1) * (u - u2) / (u2 - u1)
        else:
            pred = hist[-1][1]
        phi = math.remainder(u, TWO_PI)
        crossing = u_prev > 0.0 > u or u_prev > -math.pi > u
        try:
            arc = _track_step(cycle, phi, pred, strict=not crossing)
        except _Ambiguous:
            if abs(u - u_prev) < 1e-9:
                raise NonConvergenceError("continuation cannot separate the two branches")
            todo.append(0.5 * (u + u_prev))
            continue
        todo.pop()
        if u_prev > 0.0 >= u:
            gaps["phi_to_0"] = _limit_gap(cycle, current, "phi_to_0")
        if u_prev > -math.pi >= u:
            gaps["phi_to_pi"] = _limit_gap(cycle, current, "phi_to_pi")
        current = arc
        hist.append((u, _aligned_beta(cycle, current.orbit.conic)))
        worst = max(worst, _arc_distance(current, cycle_arc_at(cycle, phi)))
        steps += 1
    return ContinuationResult(_arc_distance(current, seed), worst, gaps, steps,
                              cycle.degenerate)


def _limit_gap(cycle, arc, end):
    """Distance from the last tracked endpoints to the radial limit ones,
    relative to the radii sum."""
    lim = rectilinear_limit(cycle, end)
    la, lb = arc_endpoints(lim)
    a, b = arc_endpoints(arc)
    return max((a - la).norm(), (b - lb).norm()) / cycle.radii_sum
