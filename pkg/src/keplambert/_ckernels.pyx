# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Function-for-function twin of ``_pykernels``; see that module for the
meaning of each argument.
"""
from libc.math cimport (sin, cos, sinh, cosh, asinh, atan2, sqrt, fabs, pow,
                        hypot, round as cround, cbrt, NAN, fmod, fmax)

from ._dop853 import A as _PA, B as _PB, C as _PC, E3 as _PE3, E5 as _PE5
from ._pykernels import KernelConvergenceError

DEF NS = 12
DEF NDIM = 7

cdef double _A[NS][NS]
cdef double _B[NS]
cdef double _E3[NS + 1]
cdef double _E5[NS + 1]

cdef int _i, _j
for _i in range(NS):
    _B[_i] = _PB[_i]
    for _j in range(NS):
        _A[_i][_j] = _PA[_i][_j] if _j < _i else 0.0
for _i in range(NS + 1):
    _E3[_i] = _PE3[_i]
    _E5[_i] = _PE5[_i]

cdef double PI = 3.141592653589793
cdef double TWO_PI = 6.283185307179586
cdef double EPS = 2.220446049250313e-16
cdef int MAX_ITER = 64

DEF C_OK = 0
DEF C_COLLISION = 1
DEF C_MAX_STEPS = 2
STATUS_OK = C_OK
STATUS_COLLISION = C_COLLISION
STATUS_MAX_STEPS = C_MAX_STEPS

BACKEND = "cython"


cdef double _u_minus_sin(double u) nogil:
    cdef double u2, term, total
    cdef int k
    if fabs(u) >= 1.0:
        return u - sin(u)
    u2 = u * u
    term = u * u2 / 6.0
    total = term
    k = 3
    while fabs(term) > 1e-17 * fabs(total):
        term *= -u2 / ((k + 1) * (k + 2))
        total += term
        k += 2
    return total


cdef double _sinh_minus(double w) nogil:
    cdef double w2, term, total
    cdef int k
    if fabs(w) >= 1.0:
        return sinh(w) - w
    w2 = w * w
    term = w * w2 / 6.0
    total = term
    k = 3
    while fabs(term) > 1e-17 * fabs(total):
        term *= w2 / ((k + 1) * (k + 2))
        total += term
        k += 2
    return total


cdef void _stumpff(double z, double *c2, double *c3) noexcept nogil:
    cdef double t2, t3, s, h
    cdef int k
    if fabs(z) < 1.0:
        c2[0] = 0.0
        c3[0] = 0.0
        t2 = 0.5
        t3 = 1.0 / 6.0
        k = 0
        while True:
            c2[0] += t2
            c3[0] += t3
            if fabs(t2) < 1e-18 and fabs(t3) < 1e-18:
                break
            t2 *= -z / ((2 * k + 3) * (2 * k + 4))
            t3 *= -z / ((2 * k + 4) * (2 * k + 5))
            k += 1
    elif z > 0.0:
        s = sqrt(z)
        h = sin(0.5 * s)
        c2[0] = 2.0 * h * h / z
        c3[0] = _u_minus_sin(s) / (z * s)
    else:
        s = sqrt(-z)
        h = sinh(0.5 * s)
        c2[0] = 2.0 * h * h / -z
        c3[0] = _sinh_minus(s) / (-z * s)


cdef double _universal_tof(double r0, double sigma0, double alpha_u, double chi) nogil:
    cdef double c2, c3
    _stumpff(alpha_u * chi * chi, &c2, &c3)
    return r0 * chi + sigma0 * chi * chi * c2 + (1.0 - alpha_u * r0) * chi * chi * chi * c3


def u_minus_sin(double u):
    return _u_minus_sin(u)


def sinh_minus(double w):
    return _sinh_minus(w)


def stumpff_c2c3(double z):
    cdef double c2, c3
    _stumpff(z, &c2, &c3)
    return c2, c3


def universal_tof(double r0, double sigma0, double alpha_u, double chi):
    return _universal_tof(r0, sigma0, alpha_u, chi)


def kepler_elliptic(double mean_anomaly, double e):
    cdef double k, m, sign, lo, hi, u, un, f, fp, half
    cdef int it
    if not (0.0 <= e <= 1.0):
        raise ValueError("eccentricity must lie in [0, 1]")
    k = cround(mean_anomaly / TWO_PI)
    m = mean_anomaly - k * TWO_PI
    sign = 1.0
    if m < 0.0:
        m = -m
        sign = -1.0
    if m == 0.0:
        return k * TWO_PI
    lo = 0.0
    hi = PI
    if e < 0.8:
        u = m
    else:
        u = min(PI, cbrt(6.0 * m))
    for it in range(MAX_ITER):
        f = (1.0 - e) * u + e * _u_minus_sin(u) - m
        if f == 0.0:
            break
        if f > 0.0:
            hi = u
        else:
            lo = u
        half = sin(0.5 * u)
        fp = (1.0 - e) + 2.0 * e * half * half
        if fp > 0.0:
            un = u - f / fp
            # converged steps may land on a bracket end, so test them first
            if fabs(un - u) <= 2.0 * EPS * max(1.0, u):
                u = un
                break
        else:
            un = 0.5 * (lo + hi)
        if not (lo < un < hi):
            un = 0.5 * (lo + hi)
        if fabs(un - u) <= 2.0 * EPS * max(1.0, u):
            u = un
            break
        u = un
    else:
        raise KernelConvergenceError("elliptic Kepler solver did not converge")
    return sign * u + k * TWO_PI


def kepler_hyperbolic(double mean_anomaly, double e):
    cdef double m, sign, lo, hi, w, wn, f, fp, half
    cdef int it
    if e < 1.0:
        raise ValueError("eccentricity must be >= 1")
    m = fabs(mean_anomaly)
    sign = -1.0 if mean_anomaly < 0.0 else 1.0
    if m == 0.0:
        return 0.0
    lo = asinh(m / e)
    hi = cbrt(6.0 * m / e)
    if e > 1.0:
        hi = min(hi, asinh(m / (e - 1.0)))
    hi = max(hi, lo)
    w = asinh((m + lo) / e)
    if not (lo <= w <= hi):
        w = 0.5 * (lo + hi)
    for it in range(MAX_ITER):
        f = (e - 1.0) * sinh(w) + _sinh_minus(w) - m
        if f == 0.0:
            break
        if f > 0.0:
            hi = w
        else:
            lo = w
        half = sinh(0.5 * w)
        fp = (e - 1.0) * cosh(w) + 2.0 * half * half
        if fp > 0.0:
            wn = w - f / fp
        else:
            wn = 0.5 * (lo + hi)
        if not (lo <= wn <= hi):
            wn = 0.5 * (lo + hi)
        if fabs(wn - w) <= 2.0 * EPS * max(1.0, w):
            w = wn
            break
        w = wn
    else:
        raise KernelConvergenceError("hyperbolic Kepler solver did not converge")
    return sign * w


cdef void _frame(double alpha, double beta, double orient, double *f) noexcept nogil:
    # scaled first so that subnormal components still give a unit vector
    cdef double m = fmax(fabs(alpha), fabs(beta))
    cdef double en
    if m == 0.0:
        f[0] = 1.0
        f[1] = 0.0
    else:
        en = hypot(alpha / m, beta / m)
        f[0] = -(alpha / m) / en
        f[1] = -(beta / m) / en
    f[2] = -orient * f[1]
    f[3] = orient * f[0]


cdef double _scale(double gamma, double e2m1) nogil:
    if e2m1 == 0.0:
        return sqrt(gamma)
    return sqrt(gamma / fabs(e2m1))


def conic_scale(double gamma, double e2m1):
    return _scale(gamma, e2m1)


cdef void _state(double alpha, double beta, double gamma, double e2m1, double orient,
                 double s, double *out) noexcept nogil:
    cdef double e = sqrt(1.0 + e2m1)
    cdef double f[4]
    cdef double rp, a, b, h, h2, X, Y, r, sdot, VX, VY, tau
    _frame(alpha, beta, orient, f)
    rp = gamma / (1.0 + e)
    if e2m1 < 0.0:
        a = -gamma / e2m1
        b = gamma / sqrt(-e2m1)
        h = sin(0.5 * s)
        h2 = 2.0 * h * h
        X = rp - a * h2
        Y = b * sin(s)
        r = rp + a * e * h2
        sdot = 1.0 / (sqrt(a) * r)
        VX = -a * sin(s) * sdot
        VY = b * cos(s) * sdot
        tau = a * sqrt(a) * (-e2m1 / (1.0 + e) * s + e * _u_minus_sin(s))
    elif e2m1 > 0.0:
        a = gamma / e2m1
        b = gamma / sqrt(e2m1)
        h = sinh(0.5 * s)
        h2 = 2.0 * h * h
        X = rp - a * h2
        Y = b * sinh(s)
        r = rp + a * e * h2
        sdot = 1.0 / (sqrt(a) * r)
        VX = -a * sinh(s) * sdot
        VY = b * cosh(s) * sdot
        tau = a * sqrt(a) * (e2m1 / (1.0 + e) * sinh(s) + _sinh_minus(s))
    else:
        X = 0.5 * gamma * (1.0 - s * s)
        Y = gamma * s
        r = 0.5 * gamma * (1.0 + s * s)
        sdot = 1.0 / (sqrt(gamma) * r)
        VX = -gamma * s * sdot
        VY = gamma * sdot
        tau = 0.5 * gamma * sqrt(gamma) * (s + s * s * s / 3.0)
    out[0] = X * f[0] + Y * f[2]
    out[1] = X * f[1] + Y * f[3]
    out[2] = VX * f[0] + VY * f[2]
    out[3] = VX * f[1] + VY * f[3]
    out[4] = tau


def conic_state(double alpha, double beta, double gamma, double e2m1, double orient, double s):
    cdef double out[5]
    _state(alpha, beta, gamma, e2m1, orient, s, out)
    return (out[0], out[1], out[2], out[3], out[4])


cdef double _anomaly(double alpha, double beta, double gamma, double e2m1, double orient,
                     double x, double y) nogil:
    cdef double e = sqrt(1.0 + e2m1)
    cdef double f[4]
    cdef double X, Y, a, b
    _frame(alpha, beta, orient, f)
    X = x * f[0] + y * f[1]
    Y = x * f[2] + y * f[3]
    if e2m1 < 0.0:
        a = -gamma / e2m1
        b = gamma / sqrt(-e2m1)
        return atan2(Y / b, X / a + e)
    if e2m1 > 0.0:
        return asinh(Y * sqrt(e2m1) / gamma)
    return Y / gamma


def conic_anomaly(double alpha, double beta, double gamma, double e2m1, double orient,
                  double x, double y):
    return _anomaly(alpha, beta, gamma, e2m1, orient, x, y)


cdef double _peri_time(double rp, double e, double alpha_u, double chi) noexcept nogil:
    cdef double c2, c3
    _stumpff(alpha_u * chi * chi, &c2, &c3)
    return rp * chi + e * chi * chi * chi * c3


cdef double _tof(double alpha, double beta, double gamma, double e2m1, double orient,
                 double s_a, double s_b) noexcept nogil:
    cdef double out[5]
    cdef double k, alpha_u, chi, c2, c3, t1, t2, t3, e, rp, ta, tb, r0, sigma0
    _state(alpha, beta, gamma, e2m1, orient, s_a, out)
    k = _scale(gamma, e2m1)
    alpha_u = -e2m1 / gamma
    chi = k * (s_b - s_a)
    r0 = hypot(out[0], out[1])
    sigma0 = out[0] * out[2] + out[1] * out[3]
    _stumpff(alpha_u * chi * chi, &c2, &c3)
    t1 = r0 * chi
    t2 = sigma0 * chi * chi * c2
    t3 = (1.0 - alpha_u * r0) * chi * chi * chi * c3
    e = sqrt(1.0 + e2m1)
    rp = gamma / (1.0 + e)
    ta = _peri_time(rp, e, alpha_u, k * s_a)
    tb = _peri_time(rp, e, alpha_u, k * s_b)
    if fabs(ta) + fabs(tb) < fabs(t1) + fabs(t2) + fabs(t3):
        return tb - ta
    return t1 + t2 + t3


def universal_tof_split(double r0, double sigma0, double alpha_u, double chi):
    cdef double c2, c3, t1, t2, t3
    _stumpff(alpha_u * chi * chi, &c2, &c3)
    t1 = r0 * chi
    t2 = sigma0 * chi * chi * c2
    t3 = (1.0 - alpha_u * r0) * chi * chi * chi * c3
    return t1 + t2 + t3, fabs(t1) + fabs(t2) + fabs(t3)


def conic_tof(double alpha, double beta, double gamma, double e2m1, double orient,
              double s_a, double s_b):
    return _tof(alpha, beta, gamma, e2m1, orient, s_a, s_b)


cdef int _arc(double alpha, double beta, double gamma, double e2m1, double orient,
              double ax, double ay, double bx, double by, int revs,
              double *s_a, double *s_b) nogil:
    cdef double ds
    s_a[0] = _anomaly(alpha, beta, gamma, e2m1, orient, ax, ay)
    s_b[0] = _anomaly(alpha, beta, gamma, e2m1, orient, bx, by)
    if e2m1 < 0.0:
        ds = fmod(s_b[0] - s_a[0], TWO_PI)
        if ds < 0.0:
            ds += TWO_PI
        if ds == 0.0:
            ds = TWO_PI
        s_b[0] = s_a[0] + ds + TWO_PI * revs
        return 1
    if revs != 0 or s_b[0] <= s_a[0]:
        return 0
    return 1


def arc_anomalies(double alpha, double beta, double gamma, double e2m1, double orient,
                  double ax, double ay, double bx, double by, int revs):
    cdef double s_a, s_b
    if _arc(alpha, beta, gamma, e2m1, orient, ax, ay, bx, by, revs, &s_a, &s_b):
        return s_a, s_b
    return None


def arc_tof(double alpha, double beta, double gamma, double e2m1, double orient,
            double ax, double ay, double bx, double by, int revs):
    cdef double s_a, s_b
    if not _arc(alpha, beta, gamma, e2m1, orient, ax, ay, bx, by, revs, &s_a, &s_b):
        return NAN
    return _tof(alpha, beta, gamma, e2m1, orient, s_a, s_b)


cdef void _deriv(double *y, bint sundman, double *f) noexcept nogil:
    cdef double r = hypot(y[0], y[1])
    cdef double r3 = r * r * r
    cdef int i
    f[0] = y[2]
    f[1] = y[3]
    f[2] = -y[0] / r3
    f[3] = -y[1] / r3
    f[4] = 1.0
    f[5] = 0.5 * (y[0] * y[3] - y[1] * y[2])
    f[6] = y[2] * y[2] + y[3] * y[3]
    if sundman:
        for i in range(NDIM):
            f[i] *= r


cdef double _step(double *y, double h, bint sundman, double K[NS + 1][NDIM],
                  double *y_new) nogil:
    cdef double yi[NDIM]
    cdef double acc, e5, e3, sc, err5 = 0.0, err3 = 0.0
    cdef int s, i, j
    for s in range(1, NS):
        for i in range(NDIM):
            acc = 0.0
            for j in range(s):
                acc += _A[s][j] * K[j][i]
            yi[i] = y[i] + h * acc
        _deriv(yi, sundman, K[s])
    for i in range(NDIM):
        acc = 0.0
        for j in range(NS):
            acc += _B[j] * K[j][i]
        y_new[i] = y[i] + h * acc
    _deriv(y_new, sundman, K[NS])
    for i in range(NDIM):
        sc = 1.0 + max(fabs(y[i]), fabs(y_new[i]))
        e5 = 0.0
        e3 = 0.0
        for j in range(NS + 1):
            e5 += _E5[j] * K[j][i]
            e3 += _E3[j] * K[j][i]
        e5 /= sc
        e3 /= sc
        err5 += e5 * e5
        err3 += e3 * e3
    if err5 == 0.0 and err3 == 0.0:
        return 0.0
    return fabs(h) * err5 / sqrt((err5 + 0.01 * err3) * NDIM)


def propagate(double x, double y, double vx, double vy, double t0, double dt,
              double tol, double guard_radius, double collision_radius, long max_steps):
    cdef double state[NDIM]
    cdef double y_new[NDIM]
    cdef double K[NS + 1][NDIM]
    cdef double t_end = t0 + dt
    cdef double r, H0, max_drift = 0.0, min_r, h_t, h_s, h, remaining
    cdef double err, scaled, factor, r_new, drift
    cdef long steps = 0, tries = 0
    cdef bint sundman, last
    cdef int i, status = C_OK
    state[0] = x
    state[1] = y
    state[2] = vx
    state[3] = vy
    state[4] = t0
    state[5] = 0.0
    state[6] = 0.0
    r = hypot(x, y)
    H0 = 0.5 * (vx * vx + vy * vy) - 1.0 / r
    min_r = r
    h_t = min(dt, 0.01 * r * sqrt(r))
    h_s = h_t / r
    with nogil:
        while state[4] < t_end:
            tries += 1
            if tries > max_steps:
                status = C_MAX_STEPS
                break
            r = hypot(state[0], state[1])
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
            _deriv(state, sundman, K[0])
            err = _step(state, h, sundman, K, y_new)
            scaled = err / tol
            if sundman and y_new[4] > t_end:
                h_s = 0.5 * h
                continue
            if scaled <= 1.0:
                if scaled == 0.0:
                    factor = 10.0
                else:
                    factor = min(10.0, 0.9 * pow(scaled, -0.125))
                if not sundman:
                    y_new[4] = t_end if last else state[4] + h
                for i in range(NDIM):
                    state[i] = y_new[i]
                steps += 1
                r_new = hypot(state[0], state[1])
                if r_new < collision_radius:
                    min_r = min(min_r, r_new)
                    status = C_COLLISION
                    break
                min_r = min(min_r, r_new)
                drift = fabs(0.5 * (state[2] * state[2] + state[3] * state[3]) - 1.0 / r_new - H0)
                max_drift = max(max_drift, drift)
                if sundman:
                    h_s = h * factor
                    h_t = h_s * r_new
                elif not last:
                    h_t = h * factor
                    h_s = h_t / r_new
            else:
                factor = max(0.2, 0.9 * pow(scaled, -0.125))
                if sundman:
                    h_s = h * factor
                else:
                    h_t = h * factor
                    h_s = h_t / r
    return (state[0], state[1], state[2], state[3], state[4], state[5], state[6],
            steps, max_drift, min_r, status)
