"""Pure-Python numerical kernels.

This module mirrors ``_ckernels.pyx`` function for function and is used
whenever the compiled extension is not available (or when
``KEPLAMBERT_PURE_PYTHON=1`` is set).  Everything works on plain floats.

Conic branches are passed around as the raw tuple
``(alpha, beta, gamma, e2m1, orient)`` where ``e2m1 = alpha**2 + beta**2 - 1``
is carried separately so that near-parabolic and flattened conics keep
their energy to full relative precision.
"""
import math

from ._dop853 import A as _A, B as _B, C as _C, E3 as _E3, E5 as _E5, N_STAGES

TWO_PI = 2.0 * math.pi
EPS = 2.220446049250313e-16
MAX_ITER = 64

STATUS_OK = 0
STATUS_COLLISION = 1
STATUS_MAX_STEPS = 2

BACKEND = "python"


class KernelConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# cancellation-free elementary pieces

def u_minus_sin(u):
    """u - sin(u), accurate for small |u|."""
    if abs(u) >= 1.0:
        return u - math.sin(u)
    u2 = u * u
    term = u * u2 / 6.0
    total = term
    k = 3
    while abs(term) > 1e-17 * abs(total):
        term *= -u2 / ((k + 1) * (k + 2))
        total += term
        k += 2
    return total


def sinh_minus(w):
    """sinh(w) - w, accurate for small |w|."""
    if abs(w) >= 1.0:
        return math.sinh(w) - w
    w2 = w * w
    term = w * w2 / 6.0
    total = term
    k = 3
    while abs(term) > 1e-17 * abs(total):
        term *= w2 / ((k + 1) * (k + 2))
        total += term
        k += 2
    return total


def stumpff_c2c3(z):
    """Stumpff functions c2(z), c3(z)."""
    if abs(z) < 1.0:
        c2 = 0.0
        c3 = 0.0
        t2 = 0.5
        t3 = 1.0 / 6.0
        k = 0
        while True:
            c2 += t2
            c3 += t3
            if abs(t2) < 1e-18 and abs(t3) < 1e-18:
                break
            t2 *= -z / ((2 * k + 3) * (2 * k + 4))
            t3 *= -z / ((2 * k + 4) * (2 * k + 5))
            k += 1
        return c2, c3
    if z > 0.0:
        s = math.sqrt(z)
        h = math.sin(0.5 * s)
        return 2.0 * h * h / z, u_minus_sin(s) / (z * s)
    s = math.sqrt(-z)
    h = math.sinh(0.5 * s)
    return 2.0 * h * h / -z, sinh_minus(s) / (-z * s)


def universal_tof(r0, sigma0, alpha_u, chi):
    """Elapsed time after advancing the universal anomaly by ``chi``.

    ``sigma0`` is q.v at the start and ``alpha_u = -2H`` (reciprocal
    semimajor axis, gravitational parameter 1).
    """
    z = alpha_u * chi * chi
    c2, c3 = stumpff_c2c3(z)
    return r0 * chi + sigma0 * chi * chi * c2 + (1.0 - alpha_u * r0) * chi ** 3 * c3


# ---------------------------------------------------------------------------
# Kepler equations

def _ecc_kepler(u, e):
    # u - e sin u split so that e -> 1, u -> 0 keeps relative accuracy
    return (1.0 - e) * u + e * u_minus_sin(u)


def kepler_elliptic(mean_anomaly, e):
    """Solve u - e sin u = M for 0 <= e <= 1 (Newton with bisection guard)."""
    if not (0.0 <= e <= 1.0):
        raise ValueError("eccentricity must lie in [0, 1]")
    k = round(mean_anomaly / TWO_PI)
    m = mean_anomaly - k * TWO_PI
    sign = 1.0
    if m < 0.0:
        m = -m
        sign = -1.0
    if m == 0.0:
        return k * TWO_PI
    lo = 0.0
    hi = math.pi
    if e < 0.8:
        u = m
    else:
        u = min(math.pi, (6.0 * m) ** (1.0 / 3.0))
    for _ in range(MAX_ITER):
        f = _ecc_kepler(u, e) - m
        if f == 0.0:
            break
        if f > 0.0:
            hi = u
        else:
            lo = u
        half = math.sin(0.5 * u)
        fp = (1.0 - e) + 2.0 * e * half * half
        if fp > 0.0:
            un = u - f / fp
            # converged steps may land on a bracket end, so test them first
            if abs(un - u) <= 2.0 * EPS * max(1.0, u):
                u = un
                break
        else:
            un = 0.5 * (lo + hi)
        if not (lo < un < hi):
            un = 0.5 * (lo + hi)
        if abs(un - u) <= 2.0 * EPS * max(1.0, u):
            u = un
            break
        u = un
    else:
        raise KernelConvergenceError("elliptic Kepler solver did not converge")
    return sign * u + k * TWO_PI


def _hyp_kepler(w, e):
    return (e - 1.0) * math.sinh(w) + sinh_minus(w)


def kepler_hyperbolic(mean_anomaly, e):
    """Solve e sinh w - w = M for e >= 1 (e = 1 is the rectilinear case)."""
    if e < 1.0:
        raise ValueError("eccentricity must be >= 1")
    m = abs(mean_anomaly)
    sign = -1.0 if mean_anomaly < 0.0 else 1.0
    if m == 0.0:
        return 0.0
    lo = math.asinh(m / e)
    hi = (6.0 * m / e) ** (1.0 / 3.0)
    if e > 1.0:
        hi = min(hi, math.asinh(m / (e - 1.0)))
    hi = max(hi, lo)
    w = math.asinh((m + lo) / e)
    if not (lo <= w <= hi):
        w = 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        f = _hyp_kepler(w, e) - m
        if f == 0.0:
            break
        if f > 0.0:
            hi = w
        else:
            lo = w
        half = math.sinh(0.5 * w)
        fp = (e - 1.0) * math.cosh(w) + 2.0 * half * half
        wn = w - f / fp if fp > 0.0 else 0.5 * (lo + hi)
        if not (lo <= wn <= hi):
            wn = 0.5 * (lo + hi)
        if abs(wn - w) <= 2.0 * EPS * max(1.0, w):
            w = wn
            break
        w = wn
    else:
        raise KernelConvergenceError("hyperbolic Kepler solver did not converge")
    return sign * w


# ---------------------------------------------------------------------------
# conic branches in anomaly form

def _frame(alpha, beta, orient):
    # scaled first so that subnormal components still give a unit vector
    m = max(abs(alpha), abs(beta))
    if m == 0.0:
        px, py = 1.0, 0.0
    else:
        a, b = alpha / m, beta / m
        en = math.hypot(a, b)
        px, py = -a / en, -b / en
    return px, py, -orient * py, orient * px


def conic_scale(gamma, e2m1):
    """Factor k with d(universal anomaly) = k d(native anomaly)."""
    if e2m1 == 0.0:
        return math.sqrt(gamma)
    return math.sqrt(gamma / abs(e2m1))


def conic_state(alpha, beta, gamma, e2m1, orient, s):
    """Position, velocity and time since pericenter at native anomaly s."""
    e = math.sqrt(1.0 + e2m1)
    px, py, qx, qy = _frame(alpha, beta, orient)
    rp = gamma / (1.0 + e)
    if e2m1 < 0.0:
        a = -gamma / e2m1
        b = gamma / math.sqrt(-e2m1)
        h = math.sin(0.5 * s)
        h2 = 2.0 * h * h
        X = rp - a * h2
        Y = b * math.sin(s)
        r = rp + a * e * h2
        sdot = 1.0 / (math.sqrt(a) * r)
        VX = -a * math.sin(s) * sdot
        VY = b * math.cos(s) * sdot
        tau = a * math.sqrt(a) * (-e2m1 / (1.0 + e) * s + e * u_minus_sin(s))
    elif e2m1 > 0.0:
        a = gamma / e2m1
        b = gamma / math.sqrt(e2m1)
        h = math.sinh(0.5 * s)
        h2 = 2.0 * h * h
        X = rp - a * h2
        Y = b * math.sinh(s)
        r = rp + a * e * h2
        sdot = 1.0 / (math.sqrt(a) * r)
        VX = -a * math.sinh(s) * sdot
        VY = b * math.cosh(s) * sdot
        tau = a * math.sqrt(a) * (e2m1 / (1.0 + e) * math.sinh(s) + sinh_minus(s))
    else:
        X = 0.5 * gamma * (1.0 - s * s)
        Y = gamma * s
        r = 0.5 * gamma * (1.0 + s * s)
        sdot = 1.0 / (math.sqrt(gamma) * r)
        VX = -gamma * s * sdot
        VY = gamma * sdot
        tau = 0.5 * gamma * math.sqrt(gamma) * (s + s * s * s / 3.0)
    return (X * px + Y * qx, X * py + Y * qy,
            VX * px + VY * qx, VX * py + VY * qy, tau)


def conic_anomaly(alpha, beta, gamma, e2m1, orient, x, y):
    """Native anomaly of a point of the branch (principal value for ellipses)."""
    e = math.sqrt(1.0 + e2m1)
    px, py, qx, qy = _frame(alpha, beta, orient)
    X = x * px + y * py
    Y = x * qx + y * qy
    if e2m1 < 0.0:
        a = -gamma / e2m1
        b = gamma / math.sqrt(-e2m1)
        return math.atan2(Y / b, X / a + e)
    if e2m1 > 0.0:
        return math.asinh(Y * math.sqrt(e2m1) / gamma)
    return Y / gamma


def _peri_time(rp, e, alpha_u, chi):
    # time from pericenter in universal form; odd in chi, all terms same sign
    c2, c3 = stumpff_c2c3(alpha_u * chi * chi)
    return rp * chi + e * chi * chi * chi * c3


def universal_tof_split(r0, sigma0, alpha_u, chi):
    """(elapsed time, sum of term magnitudes) of the universal formula."""
    c2, c3 = stumpff_c2c3(alpha_u * chi * chi)
    t1 = r0 * chi
    t2 = sigma0 * chi * chi * c2
    t3 = (1.0 - alpha_u * r0) * chi ** 3 * c3
    return t1 + t2 + t3, abs(t1) + abs(t2) + abs(t3)


def conic_tof(alpha, beta, gamma, e2m1, orient, s_a, s_b):
    """Elapsed time from s_a to s_b by the universal-variable formula.

    Two references are evaluated, the state at s_a and the pericenter, and
    the one with the smaller sum of term magnitudes (less cancellation) is
    returned.
    """
    x, y, vx, vy, _ = conic_state(alpha, beta, gamma, e2m1, orient, s_a)
    k = conic_scale(gamma, e2m1)
    alpha_u = -e2m1 / gamma
    dt_a, amp_a = universal_tof_split(math.hypot(x, y), x * vx + y * vy, alpha_u,
                                      k * (s_b - s_a))
    e = math.sqrt(1.0 + e2m1)
    rp = gamma / (1.0 + e)
    ta = _peri_time(rp, e, alpha_u, k * s_a)
    tb = _peri_time(rp, e, alpha_u, k * s_b)
    if abs(ta) + abs(tb) < amp_a:
        return tb - ta
    return dt_a


def arc_anomalies(alpha, beta, gamma, e2m1, orient, ax, ay, bx, by, revs):
    """Anomaly interval (s_a, s_b) of the arc from A to B, or None if the
    branch runs the other way (parabola/hyperbola) or winding is impossible."""
    s_a = conic_anomaly(alpha, beta, gamma, e2m1, orient, ax, ay)
    s_b = conic_anomaly(alpha, beta, gamma, e2m1, orient, bx, by)
    if e2m1 < 0.0:
        ds = (s_b - s_a) % TWO_PI
        if ds == 0.0:
            ds = TWO_PI
        return s_a, s_a + ds + TWO_PI * revs
    if revs != 0 or s_b <= s_a:
        return None
    return s_a, s_b


def arc_tof(alpha, beta, gamma, e2m1, orient, ax, ay, bx, by, revs):
    """Elapsed time on the arc A -> B of a branch; NaN if no such arc."""
    iv = arc_anomalies(alpha, beta, gamma, e2m1, orient, ax, ay, bx, by, revs)
    if iv is None:
        return math.nan
    return conic_tof(alpha, beta, gamma, e2m1, orient, iv[0], iv[1])


# ---------------------------------------------------------------------------
# DOP853 propagation of the Kepler problem, optional Sundman time

def _deriv(y, sundman):
    x, yy, vx, vy = y[0], y[1], y[2], y[3]
    r = math.hypot(x, yy)
    r3 = r * r * r
    f = [vx, vy, -x / r3, -yy / r3, 1.0, 0.5 * (x * vy - yy * vx), vx * vx + vy * vy]
    if sundman:
        f = [r * c for c in f]
    return f


def _dop853_step(y, f0, h, sundman):
    n = len(y)
    K = [f0]
    for s in range(1, N_STAGES):
        a = _A[s]
        yi = [y[i] + h * sum(a[j] * K[j][i] for j in range(s)) for i in range(n)]
        K.append(_deriv(yi, sundman))
    y_new = [y[i] + h * sum(_B[j] * K[j][i] for j in range(N_STAGES)) for i in range(n)]
    f_new = _deriv(y_new, sundman)
    K.append(f_new)
    err5 = 0.0
    err3 = 0.0
    for i in range(n):
        sc = 1.0 + max(abs(y[i]), abs(y_new[i]))
        e5 = sum(_E5[j] * K[j][i] for j in range(N_STAGES + 1)) / sc
        e3 = sum(_E3[j] * K[j][i] for j in range(N_STAGES + 1)) / sc
        err5 += e5 * e5
        err3 += e3 * e3
    if err5 == 0.0 and err3 == 0.0:
        err = 0.0
    else:
        err = abs(h) * err5 / math.sqrt((err5 + 0.01 * err3) * n)
    return y_new, f_new, err


def propagate(x, y, vx, vy, t0, dt, tol, guard_radius, collision_radius, max_steps):
    """Integrate Newton's equation from t0 over dt > 0.

    Returns (x, y, vx, vy, t, area, action, steps, max_energy_drift,
    min_radius, status).  ``area`` and ``action`` are the integrals of
    (x vy - y vx)/2 and |v|^2 carried along as extra state components.
    """
    t_end = t0 + dt
    state = [x, y, vx, vy, t0, 0.0, 0.0]
    r = math.hypot(x, y)
    H0 = 0.5 * (vx * vx + vy * vy) - 1.0 / r
    max_drift = 0.0
    min_r = r
    h_t = min(dt, 0.01 * r * math.sqrt(r))
    h_s = h_t / r
    steps = 0
    tries = 0
    while state[4] < t_end:
        tries += 1
        if tries > max_steps:
            return (*state, steps, max_drift, min_r, STATUS_MAX_STEPS)
        r = math.hypot(state[0], state[1])
        remaining = t_end - state[4]
        sundman = r < guard_radius and r * h_s < 0.5 * remaining
        last = False
        if sundman:
            h = h_s
        else:
            h = h_t
            if h >= remaining:
                h = remaining
                last = True
        f0 = _deriv(state, sundman)
        y_new, f_new, err = _dop853_step(state, f0, h, sundman)
        scaled = err / tol
        if sundman and y_new[4] > t_end:
            # overshoot in Sundman time: retry with a shorter step
            h_s = 0.5 * h
            continue
        if scaled <= 1.0:
            factor = 10.0 if scaled == 0.0 else min(10.0, 0.9 * scaled ** -0.125)
            if not sundman:
                y_new[4] = t_end if last else state[4] + h
            state = y_new
            steps += 1
            r_new = math.hypot(state[0], state[1])
            if r_new < collision_radius:
                return (*state, steps, max_drift, min(min_r, r_new), STATUS_COLLISION)
            min_r = min(min_r, r_new)
            drift = abs(0.5 * (state[2] ** 2 + state[3] ** 2) - 1.0 / r_new - H0)
            max_drift = max(max_drift, drift)
            if sundman:
                h_s = h * factor
                h_t = h_s * r_new
            elif not last:
                h_t = h * factor
                h_s = h_t / r_new
        else:
            factor = max(0.2, 0.9 * scaled ** -0.125)
            if sundman:
                h_s = h * factor
            else:
                h_t = h * factor
                h_s = h_t / r
    return (*state, steps, max_drift, min_r, STATUS_OK)
