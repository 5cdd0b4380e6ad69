# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fitting kernel; same contract as ``_purefit``."""
import numpy as np
from libc.math cimport exp, expm1, log, log1p, fabs, isfinite, NAN, INFINITY, copysign, sqrt
from libc.stdlib cimport malloc, free

cdef enum:
    SCAN_POINTS = 48

cdef enum:
    K_PCE = 0
    K_LSE = 1
    K_WLSE = 2
    K_CVME = 3
    K_ADE = 4
    K_PCE_LITERAL = 5

cdef enum:
    S_OK = 0
    S_NONFINITE = 1
    S_BUDGET = 2

cdef double _GOLDEN = 0.5 * (3.0 - sqrt(5.0))
cdef double _EPS = 2.220446049250313e-16


cdef inline double _gamma2_cdf(double u) noexcept nogil:
    cdef double h = 1.0
    cdef int k
    if u < 0.5:
        for k in range(22, 2, -1):
            h = 1.0 + u / k * h
        return exp(-u) * 0.5 * u * u * h
    return -expm1(-u) - u * exp(-u)


cdef inline double _cdf(double x, double th) noexcept nogil:
    cdef double u = th * x
    cdef double w = th / (1.0 + th)
    return w * -expm1(-u) + (1.0 - w) * _gamma2_cdf(u)


cdef inline double _log_surv(double x, double th) noexcept nogil:
    return log1p(th * x / (1.0 + th)) - th * x


cdef double _objective(int kind, const double* xs, Py_ssize_t n, double th) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0, r, p, fn = <double>n, j
    if kind == K_PCE:
        for i in range(n):
            r = log1p(-(i + 1.0) / (fn + 1.0)) - _log_surv(xs[i], th)
            s += r * r
        return s
    if kind == K_PCE_LITERAL:
        for i in range(n):
            r = (log1p(-(i + 1.0) / (fn + 1.0))
                 - log((1.0 + th + th * xs[i]) / (1.0 + th)) - th * xs[i])
            s += r * r
        return s
    if kind == K_LSE:
        for i in range(n):
            r = _cdf(xs[i], th) - (i + 1.0) / (fn + 1.0)
            s += r * r
        return s
    if kind == K_WLSE:
        for i in range(n):
            j = i + 1.0
            r = _cdf(xs[i], th) - j / (fn + 1.0)
            s += (fn + 1.0) * (fn + 1.0) * (fn + 2.0) / (j * (fn - j + 1.0)) * (r * r)
        return s
    if kind == K_CVME:
        for i in range(n):
            r = _cdf(xs[i], th) - (2.0 * (i + 1.0) - 1.0) / (2.0 * fn)
            s += r * r
        return 1.0 / (12.0 * fn) + s
    if kind == K_ADE:
        for i in range(n):
            s += (2.0 * (i + 1.0) - 1.0) * (log(_cdf(xs[i], th)) + _log_surv(xs[n - 1 - i], th))
        return -fn - s / fn
    return NAN


cdef inline double _dcdf(double x, double th) noexcept nogil:
    return th * x * exp(-th * x) * ((1.0 + th) * (1.0 + x) + 1.0) / ((1.0 + th) * (1.0 + th))


cdef double _gradient(int kind, const double* xs, Py_ssize_t n, double th) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0, r, fn = <double>n, j
    if kind == K_PCE:
        for i in range(n):
            r = log1p(-(i + 1.0) / (fn + 1.0)) - _log_surv(xs[i], th)
            s += r * (_dcdf(xs[i], th) / exp(_log_surv(xs[i], th)))
        return 2.0 * s
    if kind == K_LSE:
        for i in range(n):
            s += (_cdf(xs[i], th) - (i + 1.0) / (fn + 1.0)) * _dcdf(xs[i], th)
        return 2.0 * s
    if kind == K_WLSE:
        for i in range(n):
            j = i + 1.0
            s += ((fn + 1.0) * (fn + 1.0) * (fn + 2.0) / (j * (fn - j + 1.0))
                  * (_cdf(xs[i], th) - j / (fn + 1.0)) * _dcdf(xs[i], th))
        return 2.0 * s
    if kind == K_CVME:
        for i in range(n):
            s += (_cdf(xs[i], th) - (2.0 * (i + 1.0) - 1.0) / (2.0 * fn)) * _dcdf(xs[i], th)
        return 2.0 * s
    if kind == K_ADE:
        for i in range(n):
            s += (2.0 * (i + 1.0) - 1.0) * (_dcdf(xs[i], th) / _cdf(xs[i], th)
                                            - _dcdf(xs[n - 1 - i], th) / exp(_log_surv(xs[n - 1 - i], th)))
        return -s / fn
    return NAN


cdef double _polish(int kind, const double* xs, Py_ssize_t n, double x, double lo, double hi,
                    double tol) noexcept nogil:
    cdef double h = tol + 1e-8 * fabs(x)
    cdef double a = x, b = x
    cdef double ga = NAN, gb = NAN, gc, c = x
    cdef int side = 0, it, k
    cdef bint found = False
    if kind == K_PCE_LITERAL:
        return x
    for k in range(6):
        a = x - h if x - h > lo else lo
        b = x + h if x + h < hi else hi
        ga = _gradient(kind, xs, n, a)
        gb = _gradient(kind, xs, n, b)
        if not (isfinite(ga) and isfinite(gb)):
            return x
        if ga < 0.0 and gb > 0.0:
            found = True
            break
        h *= 10.0
    if not found:
        return x
    for it in range(60):
        c = (a * gb - b * ga) / (gb - ga)
        if not (a < c and c < b):
            c = 0.5 * (a + b)
        gc = _gradient(kind, xs, n, c)
        if not isfinite(gc) or gc == 0.0 or b - a <= 4.0 * _EPS * fabs(c):
            break
        if (gc < 0.0) == (ga < 0.0):
            a = c
            ga = gc
            if side == -1:
                gb *= 0.5
            side = -1
        else:
            b = c
            gb = gc
            if side == 1:
                ga *= 0.5
            side = 1
    return c


cdef int _brent(int kind, const double* xs, Py_ssize_t n, double a, double b, double tol,
                int max_evals, double* xout, double* fout, int* nfev) noexcept nogil:
    cdef double x, w, v, fx, fw, fv, d = 0.0, e = 0.0, xm, tol1, tol2, p, q, r, u, fu
    cdef bint golden
    x = a + _GOLDEN * (b - a)
    w = x
    v = x
    nfev[0] = 1
    fx = _objective(kind, xs, n, x)
    if not isfinite(fx):
        xout[0] = x
        return S_NONFINITE
    fw = fx
    fv = fx
    while True:
        xm = 0.5 * (a + b)
        tol1 = 2.0 * _EPS * fabs(x) + tol / 3.0
        tol2 = 2.0 * tol1
        if fabs(x - xm) <= tol2 - 0.5 * (b - a):
            break
        golden = True
        if fabs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = fabs(q)
            r = e
            e = d
            if fabs(p) < fabs(0.5 * q * r) and q * (a - x) < p and p < q * (b - x):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < xm else -tol1
                golden = False
        if golden:
            e = (a - x) if x >= xm else (b - x)
            d = _GOLDEN * e
        u = x + (d if fabs(d) >= tol1 else copysign(tol1, d))
        if nfev[0] >= max_evals:
            return S_BUDGET
        nfev[0] += 1
        fu = _objective(kind, xs, n, u)
        if not isfinite(fu):
            xout[0] = u
            return S_NONFINITE
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v = w
            fv = fw
            w = x
            fw = fx
            x = u
            fx = fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v = w
                fv = fw
                w = u
                fw = fu
            elif fu <= fv or v == x or v == w:
                v = u
                fv = fu
    xout[0] = x
    fout[0] = fx
    return S_OK


cdef int _fit(int kind, const double* xs, Py_ssize_t n, double lo, double hi, double tol,
              int max_evals, double* theta, double* value, int* nfev) noexcept nogil:
    cdef double grid[SCAN_POINTS]
    cdef double vals[SCAN_POINTS]
    cdef double step = (log(hi) - log(lo)) / (SCAN_POINTS - 1)
    cdef double best = INFINITY, a, b
    cdef int i, ibest = -1, status, inner = 0
    for i in range(SCAN_POINTS):
        grid[i] = exp(log(lo) + step * i)
    grid[0] = lo
    grid[SCAN_POINTS - 1] = hi
    for i in range(SCAN_POINTS):
        vals[i] = _objective(kind, xs, n, grid[i])
        if not isfinite(vals[i]):
            vals[i] = INFINITY
        if vals[i] < best:
            best = vals[i]
            ibest = i
    if ibest < 0:
        theta[0] = lo
        value[0] = NAN
        nfev[0] = SCAN_POINTS
        return S_NONFINITE
    a = grid[ibest - 1] if ibest > 0 else grid[0]
    b = grid[ibest + 1] if ibest < SCAN_POINTS - 1 else grid[SCAN_POINTS - 1]
    status = _brent(kind, xs, n, a, b, tol, max_evals - SCAN_POINTS, theta, value, &inner)
    if status == S_NONFINITE:
        value[0] = NAN
        nfev[0] = max_evals
        return status
    if status == S_BUDGET:
        theta[0] = NAN
        value[0] = NAN
        nfev[0] = max_evals
        return status
    nfev[0] = SCAN_POINTS + inner
    if best < value[0]:
        theta[0] = grid[ibest]
        value[0] = best
        return S_OK
    theta[0] = _polish(kind, xs, n, theta[0], lo, hi, tol)
    value[0] = _objective(kind, xs, n, theta[0])
    return S_OK


def objective(int kind, xs, double theta):
    cdef const double[::1] buf = np.ascontiguousarray(xs, dtype=np.float64)
    return _objective(kind, &buf[0], buf.shape[0], theta)


def fit_theta(int kind, xs, double lo, double hi, double tol, int max_evals):
    cdef const double[::1] buf = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double theta = NAN, value = NAN
    cdef int nfev = 0, status
    with nogil:
        status = _fit(kind, &buf[0], buf.shape[0], lo, hi, tol, max_evals, &theta, &value, &nfev)
    return theta, value, nfev, status


def fit_batch(int kind, rows, double lo, double hi, double tol, int max_evals):
    cdef const double[:, ::1] buf = np.ascontiguousarray(rows, dtype=np.float64)
    cdef Py_ssize_t m = buf.shape[0], n = buf.shape[1], r
    theta = np.empty(m)
    value = np.empty(m)
    nfev = np.empty(m, dtype=np.int64)
    status = np.empty(m, dtype=np.int64)
    cdef double[::1] th = theta, va = value
    cdef long long[::1] nf = nfev, st = status
    cdef int nfe = 0
    with nogil:
        for r in range(m):
            st[r] = _fit(kind, &buf[r, 0], n, lo, hi, tol, max_evals, &th[r], &va[r], &nfe)
            nf[r] = nfe
    return theta, value, nfev, status
