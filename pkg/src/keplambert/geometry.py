"""Boundary-value geometry of Keplerian arcs with fixed ends A and B.

Everything is computed in an aligned frame: a rotation about O sending
the chord direction B - A to +x, so that A and B share the ordinate y0.
In that frame every branch through A and B has the same alpha and the
branches form the one-parameter line

    gamma = gamma0 - beta * y0,     e**2 - 1 = beta**2 - (1 - alpha**2)

parametrized here by the distance ``delta`` of beta from one of the two
parabolic members.  Quantities such as 1 +- alpha and r +- x are
evaluated in cancellation-free forms because near-rectilinear and
near-parabolic configurations depend on them.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from enum import Enum

from scipy.optimize import brentq, minimize_scalar

from . import kernels
from .conic import ConicOrbit, KeplerianArc, RectilinearOrbit, UnifocalConic, Vec2
from .errors import (DegenerateError, InfeasibleError, NonConvergenceError,
                     RectilinearFamilyError)
from .kepler import (TWO_PI, conic_arc, epoch_at, position_at, rectilinear_arc_by_class,
                     time_of_flight)

SAME_RAY_ANGLE = 1e-7
EPS = 2.220446049250313e-16


class Direction(Enum):
    CCW = 1
    CW = -1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        return cls[str(value).upper()]


class Winding(Enum):
    DIRECT = "direct"
    INDIRECT = "indirect"


@dataclass(frozen=True)
class ArcClass:
    about_O: Winding
    about_F: Winding

    @property
    def label(self):
        o = "D" if self.about_O is Winding.DIRECT else "I"
        f = "D" if self.about_F is Winding.DIRECT else "I"
        return f"{o}_O {f}_F"


@dataclass(frozen=True)
class ChordConfig:
    A: Vec2
    B: Vec2

    def __post_init__(self):
        A = Vec2(*self.A)
        B = Vec2(*self.B)
        if A.norm() == 0.0 or B.norm() == 0.0:
            raise ValueError("endpoints must differ from the origin")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def chord(self):
        return (self.B - self.A).norm()

    @property
    def r_A(self):
        return self.A.norm()

    @property
    def r_B(self):
        return self.B.norm()

    @property
    def radii_sum(self):
        return self.r_A + self.r_B

    def ray_angle(self):
        return math.atan2(abs(self.A.cross(self.B)), self.A.dot(self.B))

    def same_ray(self):
        return self.ray_angle() < SAME_RAY_ANGLE


def _r_plus_x(r, x, y):
    return r + x if x >= 0.0 else y * y / (r - x)


def _r_minus_x(r, x, y):
    return r - x if x <= 0.0 else y * y / (r + x)


@dataclass(frozen=True)
class AlignedFrame:
    """Chord-aligned frame of a configuration.

    ``P = 1 + alpha`` and ``Q = 1 - alpha`` for the common alpha of all
    branches through A and B; ``gamma0`` is the semiparameter of the
    member with beta = 0.
    """
    c: float
    s: float
    xA: float
    xB: float
    y0: float
    rA: float
    rB: float
    P: float
    Q: float
    gamma0: float

    @property
    def alpha(self):
        return 0.5 * (self.P - self.Q)

    @property
    def sin_phi(self):
        return math.sqrt(self.P * self.Q)

    @property
    def chord(self):
        return self.xB - self.xA

    @property
    def A(self):
        return Vec2(self.xA, self.y0)

    @property
    def B(self):
        return Vec2(self.xB, self.y0)

    def to_world(self, p):
        return Vec2(*p).rotated(self.c, -self.s)

    def from_world(self, p):
        return Vec2(*p).rotated(self.c, self.s)

    def conic_to_world(self, conic):
        return conic.rotated(self.c, -self.s)

    @property
    def rpx_A(self):
        return _r_plus_x(self.rA, self.xA, self.y0)

    @property
    def rmx_A(self):
        return _r_minus_x(self.rA, self.xA, self.y0)

    def radii_minus_chord(self):
        """r_A + r_B - |AB| without cancellation."""
        if self.xA < 0.0 < self.xB:
            y2 = self.y0 * self.y0
            return y2 / (self.rA - self.xA) + y2 / (self.rB + self.xB)
        return _r_plus_x(self.rA, self.xA, self.y0) + _r_minus_x(self.rB, self.xB, self.y0)

    def small_parabola_gamma(self):
        """Semiparameter of the parabola through A and B with the smaller
        one, i.e. gamma0 - sin_phi * |y0|, without cancellation."""
        c = self.chord
        semi = 0.5 * (self.rA + self.rB + c)
        semi_c = 0.5 * self.radii_minus_chord()
        root = math.sqrt(semi) + math.sqrt(semi_c)
        dot = self.xA * self.xB + self.y0 * self.y0
        if dot > 0.0:
            # c**2 - (rA - rB)**2 = 2 (A x B)**2 / (rA rB + A.B)
            q = 2.0 * (self.y0 * c) ** 2 / (self.rA * self.rB + dot)
        else:
            q = (c + self.rB - self.rA) * (c + self.rA - self.rB)
        return 0.5 * q / (root * root)


def frame_align(A, B):
    """Rotation about O taking the chord direction B - A to +x."""
    A = Vec2(*A)
    B = Vec2(*B)
    d = B - A
    n = d.norm()
    if n == 0.0:
        raise ValueError("coinciding endpoints")
    c, s = d.x / n, -d.y / n
    Ap = A.rotated(c, s)
    # distance of the chord line from O, from the correctly rounded cross
    # product; rotating the points would leave an absolute error of one ulp
    # of the radii, which dominates when the chord nearly passes through O
    y0 = -float(Fraction(A.x) * Fraction(B.y) - Fraction(A.y) * Fraction(B.x)) / n
    xA = Ap.x
    xB = xA + n
    rA = A.norm()
    rB = B.norm()
    if xA < 0.0 < xB:
        wA = 1.0 / (rA - xA)
        wB = 1.0 / (rB + xB)
        P = 2.0 * wA / (wA + wB)
        Q = 2.0 * wB / (wA + wB)
    else:
        tA = _r_plus_x(rA, xA, y0)
        tB = _r_minus_x(rB, xB, y0)
        P = 2.0 * tA / (tA + tB)
        Q = 2.0 * tB / (tA + tB)
    if xA >= 0.0:
        gamma0 = _r_minus_x(rA, xA, y0) + Q * xA
    else:
        gamma0 = _r_plus_x(rA, xA, y0) - P * xA
    return AlignedFrame(c, s, xA, xB, y0, rA, rB, P, Q, gamma0)


def _check_admissible(cfg):
    if cfg.A == cfg.B:
        raise ValueError("coinciding endpoints")
    if cfg.same_ray():
        raise RectilinearFamilyError("rectilinear family: use rectilinear solver")


# ---------------------------------------------------------------------------
# minimal energy, Gauss's construction, Euler's formula

def h_min(cfg):
    return -2.0 / (cfg.chord + cfg.r_A + cfg.r_B)


def gauss_discriminant(fr, H):
    """Discriminant of the energy circle against the line alpha = const."""
    return (fr.Q + H * fr.rmx_A) * (fr.P + H * fr.rpx_A)


def gauss_roots(fr, H):
    """Aligned-frame (beta, gamma) of the branches through A, B with energy H
    (one pair at tangency, none below the minimal energy).

    The roots satisfy beta1 beta2 = -(2 H gamma0 + sin(phi)**2) and
    gamma1 gamma2 = gamma0**2 - y0**2 sin(phi)**2 (independent of H); the
    smaller root of each pair is taken from these products so that nearly
    rectilinear members keep their relative accuracy.
    """
    disc = gauss_discriminant(fr, H)
    scale = (fr.Q + abs(H) * fr.rmx_A) * (fr.P + abs(H) * fr.rpx_A)
    band = 8.0 * EPS * scale
    if disc < -band:
        return []
    centre = -H * fr.y0
    if disc <= band:
        pairs = [(centre, fr.gamma0 + H * fr.y0 * fr.y0)]
    else:
        sq = math.sqrt(disc)
        big = centre + math.copysign(sq, centre)
        prod = -(2.0 * H * fr.gamma0 + fr.P * fr.Q)
        small = prod / big if big != 0.0 else centre - sq
        g_big, g_small = fr.gamma0 - big * fr.y0, fr.gamma0 - small * fr.y0
        k0 = fr.gamma0 * fr.gamma0 - fr.y0 * fr.y0 * fr.P * fr.Q
        if abs(g_big) >= abs(g_small) and g_big > 0.0:
            g_small = k0 / g_big
        elif abs(g_small) > abs(g_big) and g_small > 0.0:
            g_big = k0 / g_small
        pairs = sorted([(small, g_small), (big, g_big)])
    return [(b, g) for b, g in pairs if g > 0.0]


def gauss_betas(fr, H):
    """Aligned-frame beta values of the branches through A, B with energy H
    (ascending; one value at tangency)."""
    return [b for b, _ in gauss_roots(fr, H)]


def gauss_rescaled(cfg, H, aligned=False):
    """Branches through A and B with energy H: 0, 1 (at H = h_min) or 2."""
    if not isinstance(cfg, ChordConfig):
        cfg = ChordConfig(*cfg)
    _check_admissible(cfg)
    fr = frame_align(cfg.A, cfg.B)
    out = []
    for b, gamma in gauss_roots(fr, H):
        conic = UnifocalConic(fr.alpha, b, gamma, 2.0 * H * gamma)
        out.append(conic if aligned else fr.conic_to_world(conic))
    return out


def euler_parabolic_tof(cfg, indirect=False):
    """Parabolic elapsed time from chord and radii (minus sign: direct)."""
    if not isinstance(cfg, ChordConfig):
        cfg = ChordConfig(*cfg)
    c = cfg.chord
    if c == 0.0:
        return 0.0
    fr = frame_align(cfg.A, cfg.B)
    lo = fr.radii_minus_chord()
    hi = cfg.r_A + cfg.r_B + c
    a = hi ** 1.5
    b = lo ** 1.5
    if indirect:
        return (a + b) / 6.0
    return 2.0 * c * (hi * hi + hi * lo + lo * lo) / (a + b) / 6.0


# ---------------------------------------------------------------------------
# the pencil of branches through A and B

def pencil_conic(fr, sigma, delta):
    """Aligned-frame branch at distance ``delta`` from the parabola
    beta = sigma * beta_p, towards the other parabola (None if gamma <= 0)."""
    bp = fr.sin_phi
    beta = sigma * (bp - delta)
    if sigma * fr.y0 > 0.0:
        gamma = fr.small_parabola_gamma() + delta * abs(fr.y0)
    else:
        gamma = fr.gamma0 - beta * fr.y0
    if not gamma > 0.0:
        return None
    e2m1 = -delta * (2.0 * bp - delta)
    return UnifocalConic(fr.alpha, beta, gamma, e2m1)


def pencil_conic_far(fr, sigma, eps):
    """Same member as ``pencil_conic(fr, sigma, far - eps)`` when the pencil
    ends at the degenerate member gamma = 0, parametrized by the distance
    ``eps`` to it.  Near that end the arcs become nearly radial and this
    form keeps gamma and e**2 - 1 free of cancellation."""
    g = fr.gamma0 / abs(fr.y0)
    gamma = abs(fr.y0) * eps
    if not gamma > 0.0:
        return None
    beta = sigma * (eps - g)
    # e**2 - 1 of the degenerate member is tan(theta/2)**2, theta = angle AOB
    cross = abs(fr.y0) * fr.chord
    t = cross / (fr.rA * fr.rB + fr.xA * fr.xB + fr.y0 * fr.y0)
    e2m1 = (fr.sin_phi + g - eps) * (t * t / (g + fr.sin_phi) - eps)
    return UnifocalConic(fr.alpha, beta, gamma, e2m1)


def pencil_tof(fr, sigma, delta, orient, revs=0):
    conic = pencil_conic(fr, sigma, delta)
    if conic is None:
        return math.nan
    return kernels.arc_tof(conic.alpha, conic.beta, conic.gamma, conic.e2m1,
                           float(orient), fr.xA, fr.y0, fr.xB, fr.y0, int(revs))


def _parabola_feasible(fr, sigma, orient):
    conic = pencil_conic(fr, sigma, 0.0)
    if conic is None:
        return False
    t = kernels.arc_tof(conic.alpha, conic.beta, conic.gamma, 0.0, float(orient),
                        fr.xA, fr.y0, fr.xB, fr.y0, 0)
    return math.isfinite(t) and t > 0.0


def pencil_side(fr, orient):
    """(sigma, delta_far): the parabola beta = sigma*beta_p is the member at
    which arcs of this orientation become infinitely long; delta runs from
    there to delta_far, where the elapsed time tends to zero."""
    if _parabola_feasible(fr, 1, orient):
        sigma = -1
    elif _parabola_feasible(fr, -1, orient):
        sigma = 1
    else:  # pragma: no cover - excluded by the geometry
        raise DegenerateError("no parabolic member carries this orientation")
    if sigma * fr.y0 < 0.0:
        far = fr.sin_phi + fr.gamma0 / abs(fr.y0)
    else:
        far = math.inf
    return sigma, far


def _arc_on_world(fr, conic_aligned, orient, revs, A, B):
    conic = fr.conic_to_world(conic_aligned)
    args = (conic.alpha, conic.beta, conic.gamma, conic.e2m1, float(orient))
    iv = kernels.arc_anomalies(*args, A.x, A.y, B.x, B.y, int(revs))
    if iv is None:
        raise InfeasibleError("branch does not carry the requested arc")
    return conic_arc(conic, orient, iv[0], iv[1])


def _log_residual(fr, sigma, orient, revs, log_dt):
    def g(delta):
        t = pencil_tof(fr, sigma, delta, orient, revs)
        if not t > 0.0:
            return -math.inf
        return math.log(t) - log_dt
    return g


def _brent(g, lo, hi):
    try:
        return brentq(g, lo, hi, xtol=1e-300, rtol=4.0 * EPS, maxiter=400)
    except RuntimeError as exc:  # pragma: no cover
        raise NonConvergenceError(str(exc)) from None


def _bracket_down(g, start):
    """Largest tested delta < start with g > 0, halving towards 0."""
    d = start
    for _ in range(2100):
        d *= 0.5
        if d == 0.0:
            break
        if g(d) > 0.0:
            return d
    raise InfeasibleError("elapsed time out of reach")


def _bracket_up(g, start, far):
    d = start
    for k in range(1, 2100):
        if math.isfinite(far):
            d_new = far - (far - start) * 0.5 ** k
            if d_new >= far:
                break
        else:
            d_new = start * 2.0 ** k
            if not math.isfinite(d_new):
                break
        if g(d_new) < 0.0:
            return d, d_new
        d = d_new
    raise InfeasibleError("elapsed time out of reach")


def solve_lambert(A, B, dt, direction=Direction.CCW, revolutions=0, long_period=False):
    """Keplerian arc from A to B with elapsed time dt.

    ``direction`` fixes the sign of the angular momentum.  With
    revolutions >= 1 two arcs may exist; the one with the smaller
    semimajor axis is returned unless ``long_period`` is set.
    """
    A = Vec2(*A)
    B = Vec2(*B)
    cfg = ChordConfig(A, B)
    _check_admissible(cfg)
    if not dt > 0.0 or not math.isfinite(dt):
        raise ValueError("dt must be a positive finite number")
    revolutions = int(revolutions)
    if revolutions < 0:
        raise ValueError("revolutions must be >= 0")
    orient = Direction.parse(direction).value
    fr = frame_align(A, B)
    sigma, far = pencil_side(fr, orient)
    bp = fr.sin_phi
    log_dt = math.log(dt)
    g = _log_residual(fr, sigma, orient, revolutions, log_dt)
    if revolutions == 0:
        start = bp
        g0 = g(start)
        if g0 == 0.0:
            delta = start
        elif g0 > 0.0:
            lo, hi = _bracket_up(g, start, far)
            delta = _brent(g, lo, hi)
        else:
            lo = _bracket_down(g, start)
            delta = _brent(g, lo, start)
    else:
        res = minimize_scalar(g, bounds=(0.0, 2.0 * bp), method="bounded",
                              options={"xatol": 1e-14 * bp, "maxiter": 500})
        d_min = float(res.x)
        g_min = g(d_min)
        if g_min > 1e-13:
            raise InfeasibleError("no arc with requested winding")
        if g_min >= 0.0:
            delta = d_min
        else:
            delta = _multi_rev_pick(g, d_min, bp, fr, sigma, largest=long_period)
    if math.isfinite(far) and far - delta < 0.5 * (far - bp):
        def make(eps):
            return pencil_conic_far(fr, sigma, eps)
        x = far - delta
    else:
        def make(d):
            return pencil_conic(fr, sigma, d)
        x = delta
    x = _world_polish(make, fr, orient, revolutions, A, B, log_dt, x)
    return _arc_on_world(fr, make(x), orient, revolutions, A, B)


def _world_polish(make, fr, orient, revs, A, B, log_dt, x):
    """Refit the pencil parameter ``x`` on the world-frame arc, so that the
    returned arc carries the requested time to rounding."""
    def gw(d):
        conic = make(d)
        if conic is None:
            return math.nan
        try:
            arc = _arc_on_world(fr, conic, orient, revs, A, B)
        except (InfeasibleError, ValueError):
            return math.nan
        t = time_of_flight(arc)
        return math.log(t) - log_dt if t > 0.0 else math.nan

    g0 = gw(x)
    if not math.isfinite(g0) or abs(g0) <= 2.0 * EPS:
        return x
    step = 4.0 * EPS * max(abs(x), 1e-300)
    for _ in range(60):
        best = None
        for d in (x - step, x + step):
            v = gw(d)
            if math.isfinite(v) and v * g0 < 0.0:
                best = d
                break
        if best is not None:
            lo, hi = sorted((x, best))
            try:
                return brentq(gw, lo, hi, xtol=1e-300, rtol=4.0 * EPS, maxiter=200)
            except (RuntimeError, ValueError):  # pragma: no cover
                return x
        step *= 2.0
    return x


def _multi_rev_pick(g, d_min, bp, fr, sigma, largest):
    """Both roots around the time minimum; return one by semimajor axis."""
    left = _brent(g, _bracket_down(g, d_min), d_min)
    two_bp = 2.0 * bp

    def g_mirror(dp):
        # distance from the other parabola
        return g(two_bp - dp)
    dp_min = two_bp - d_min
    right = two_bp - _brent(g_mirror, _bracket_down(g_mirror, dp_min), dp_min)
    cands = []
    for d in (left, right):
        c = pencil_conic(fr, sigma, d)
        cands.append((c.gamma / -c.e2m1, d))
    cands.sort()
    return cands[-1][1] if largest else cands[0][1]


def lambert_solution_count(A, B, dt, direction, samples=400):
    """Number of sign changes of elapsed time minus dt along the pencil, for
    sub-revolution arcs of one orientation, plus a monotonicity flag."""
    A = Vec2(*A)
    B = Vec2(*B)
    cfg = ChordConfig(A, B)
    _check_admissible(cfg)
    orient = Direction.parse(direction).value
    fr = frame_align(A, B)
    sigma, far = pencil_side(fr, orient)
    bp = fr.sin_phi
    ds = []
    for k in range(samples):
        ds.append(bp * 2.0 ** (-40.0 + 40.0 * k / samples))
    for k in range(samples + 1):
        ds.append(bp + bp * k / samples)
    if math.isfinite(far):
        span = far - 2.0 * bp
        for k in range(1, samples):
            ds.append(far - span * 2.0 ** (-40.0 * k / samples))
    else:
        for k in range(1, samples):
            ds.append(2.0 * bp * 2.0 ** (40.0 * k / samples))
    ds = sorted(set(d for d in ds if 0.0 < d < far))
    vals = [pencil_tof(fr, sigma, d, orient, 0) for d in ds]
    vals = [(d, v) for d, v in zip(ds, vals) if math.isfinite(v)]
    changes = 0
    monotone = True
    for (d0, v0), (d1, v1) in zip(vals, vals[1:]):
        if (v0 - dt) * (v1 - dt) < 0.0:
            changes += 1
        if v1 > v0 * (1.0 + 1e-13):
            monotone = False
    return changes, monotone


# ---------------------------------------------------------------------------
# rectilinear Lambert problem (both ends on one ray)

def solve_lambert_rectilinear(A, B, dt, indirect_O=False, indirect_F=False,
                              revolutions=0):
    """Rectilinear arc from A to B (same ray) of the given class with
    elapsed time dt, found by root search on the energy."""
    A = Vec2(*A)
    B = Vec2(*B)
    rA, rB = A.norm(), B.norm()
    cfg_r = max(rA, rB)
    if rA > 0.0 and rB > 0.0 and ChordConfig(A, B).ray_angle() > SAME_RAY_ANGLE:
        raise ValueError("endpoints are not on one ray")
    ray = (A if rA >= rB else B).unit()
    h_low = -1.0 / cfg_r

    def f(H):
        try:
            arc = rectilinear_arc_by_class(ray, H, rA, rB, indirect_O, indirect_F, revolutions)
        except InfeasibleError:
            return math.nan
        return math.log(time_of_flight(arc)) - math.log(dt)

    # increasing energies: dense near the culmination limit and near zero
    grid = sorted({h_low * (1.0 - 2.0 ** -k) for k in range(1, 60)}
                  | {h_low * 2.0 ** -k for k in range(1, 60)})
    grid += [0.0] + [2.0 ** k / cfg_r for k in range(-40, 60)]
    prev = None
    for H in grid:
        val = f(H)
        if not math.isfinite(val):
            continue
        if val == 0.0:
            return rectilinear_arc_by_class(ray, H, rA, rB, indirect_O, indirect_F, revolutions)
        if prev is not None and prev[1] * val < 0.0:
            H = brentq(f, prev[0], H, xtol=1e-300, rtol=4.0 * EPS, maxiter=400)
            return rectilinear_arc_by_class(ray, H, rA, rB, indirect_O, indirect_F, revolutions)
        prev = (H, val)
    raise InfeasibleError("no rectilinear arc of this class has the requested time")


# ---------------------------------------------------------------------------
# classification

def _side(A, B, P):
    return (B - A).cross(P - A)


def classify_arc(arc):
    """Direct/indirect with respect to O and to the second focus F."""
    orbit = arc.orbit
    if isinstance(orbit, RectilinearOrbit):
        H = orbit.H
        uA, uB = arc.s_A, arc.s_B
        if H < 0.0:
            if uB - uA >= TWO_PI:
                raise ValueError("classification defined for sub-revolution arcs")
            collide = math.floor(uB / TWO_PI) >= math.ceil(uA / TWO_PI)
            culminate = math.floor((uB - math.pi) / TWO_PI) >= math.ceil((uA - math.pi) / TWO_PI)
        else:
            collide = uA <= 0.0 <= uB
            culminate = False
        return ArcClass(Winding.INDIRECT if collide else Winding.DIRECT,
                        Winding.INDIRECT if culminate else Winding.DIRECT)
    if orbit.H < 0.0 and arc.s_B - arc.s_A >= TWO_PI:
        raise ValueError("classification defined for sub-revolution arcs")
    A = position_at(orbit, arc.s_A)
    B = position_at(orbit, arc.s_B)
    mid = position_at(orbit, 0.5 * (arc.s_A + arc.s_B))
    s_mid = _side(A, B, mid)
    s_O = _side(A, B, Vec2(0.0, 0.0))
    about_O = Winding.INDIRECT if s_O * s_mid >= 0.0 else Winding.DIRECT
    if orbit.conic.e2m1 >= 0.0:
        about_F = Winding.DIRECT
    else:
        c = orbit.conic
        a = -c.gamma / c.e2m1
        F = Vec2(2.0 * a * c.alpha, 2.0 * a * c.beta)
        s_F = _side(A, B, F)
        about_F = Winding.INDIRECT if s_F * s_mid >= 0.0 else Winding.DIRECT
    return ArcClass(about_O, about_F)


def arc_config(arc):
    A = position_at(arc.orbit, arc.s_A)
    B = position_at(arc.orbit, arc.s_B)
    return ChordConfig(A, B)


def gauss_arcs(cfg, H, orientation, revolutions=0):
    """Arcs A -> B of the given orientation on every Gauss branch of energy H."""
    out = []
    for conic in gauss_rescaled(cfg, H):
        args = (conic.alpha, conic.beta, conic.gamma, conic.e2m1, float(orientation))
        iv = kernels.arc_anomalies(*args, cfg.A.x, cfg.A.y, cfg.B.x, cfg.B.y, int(revolutions))
        if iv is not None:
            out.append(conic_arc(conic, orientation, iv[0], iv[1]))
    return out


def departure_epoch(arc):
    return epoch_at(arc.orbit, arc.s_A)
