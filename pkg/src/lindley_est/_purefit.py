"""Pure-Python fitting kernel.

Mirrors the compiled ``_kernels`` extension function for function: the five
minimum-distance objectives on sorted data, and a fit routine that scans a
log-spaced grid, refines the best cell with Brent's method and polishes the
result to a root of the analytic derivative.
"""
import math

import numpy as np

from .errors import ConvergenceError, EvaluationError
from .optimize import Bracket, minimize_scalar

PCE, LSE, WLSE, CVME, ADE, PCE_LITERAL = range(6)
SCAN_POINTS = 48

OK, NONFINITE, BUDGET = 0, 1, 2


def _cdf(x, theta):
    u = theta * x
    w = theta / (1.0 + theta)
    small = u < 0.5
    us = np.where(small, u, 0.0)
    horner = np.ones_like(us)
    for k in range(22, 2, -1):
        horner = 1.0 + us / k * horner
    g2 = np.where(small, np.exp(-us) * 0.5 * us * us * horner,
                  -np.expm1(-u) - u * np.exp(-u))
    return w * -np.expm1(-u) + (1.0 - w) * g2


def _log_surv(x, theta):
    return np.log1p(theta * x / (1.0 + theta)) - theta * x


def _positions(n):
    i = np.arange(1, n + 1, dtype=float)
    return i / (n + 1.0)


def _weights(n):
    j = np.arange(1, n + 1, dtype=float)
    return (n + 1.0) ** 2 * (n + 2.0) / (j * (n - j + 1.0))


def make_objective(kind, xs):
    """Return ``theta -> objective`` for sorted observations ``xs``."""
    xs = np.ascontiguousarray(xs, dtype=float)
    n = xs.size
    if kind == PCE or kind == PCE_LITERAL:
        log_q = np.log1p(-_positions(n))
        if kind == PCE:
            def obj(theta):
                r = log_q - _log_surv(xs, theta)
                return float(r @ r)
        else:
            def obj(theta):
                r = log_q - np.log((1.0 + theta + theta * xs) / (1.0 + theta)) - theta * xs
                return float(r @ r)
        return obj
    if kind == LSE:
        p = _positions(n)

        def obj(theta):
            r = _cdf(xs, theta) - p
            return float(r @ r)
        return obj
    if kind == WLSE:
        p = _positions(n)
        w = _weights(n)

        def obj(theta):
            r = _cdf(xs, theta) - p
            return float(w @ (r * r))
        return obj
    if kind == CVME:
        p = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)

        def obj(theta):
            r = _cdf(xs, theta) - p
            return 1.0 / (12.0 * n) + float(r @ r)
        return obj
    if kind == ADE:
        c = 2.0 * np.arange(1, n + 1) - 1.0
        rev = xs[::-1].copy()

        def obj(theta):
            with np.errstate(divide="ignore"):
                terms = np.log(_cdf(xs, theta)) + _log_surv(rev, theta)
            return -n - float(c @ terms) / n
        return obj
    raise ValueError(f"unknown objective kind {kind}")


def _dcdf(x, theta):
    return theta * x * np.exp(-theta * x) * ((1.0 + theta) * (1.0 + x) + 1.0) / (1.0 + theta) ** 2


def make_gradient(kind, xs):
    """Return ``theta -> d objective / d theta`` for sorted ``xs``."""
    xs = np.ascontiguousarray(xs, dtype=float)
    n = xs.size
    if kind == PCE:
        log_q = np.log1p(-_positions(n))

        def grad(theta):
            r = log_q - _log_surv(xs, theta)
            return 2.0 * float(r @ (_dcdf(xs, theta) / np.exp(_log_surv(xs, theta))))
        return grad
    if kind in (LSE, WLSE, CVME):
        if kind == CVME:
            p = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
            w = np.ones(n)
        else:
            p = _positions(n)
            w = _weights(n) if kind == WLSE else np.ones(n)

        def grad(theta):
            return 2.0 * float(w @ ((_cdf(xs, theta) - p) * _dcdf(xs, theta)))
        return grad
    if kind == ADE:
        c = 2.0 * np.arange(1, n + 1) - 1.0
        rev = xs[::-1].copy()

        def grad(theta):
            a = _dcdf(xs, theta) / _cdf(xs, theta)
            b = _dcdf(rev, theta) / np.exp(_log_surv(rev, theta))
            return -float(c @ (a - b)) / n
        return grad
    return None


def polish(grad, x, lo, hi, tol):
    """Refine a Brent minimizer to a root of the gradient.

    Looks for a minimum-type sign change of ``grad`` on ``[x - h, x + h]``,
    starting from ``h = tol + 1e-8 |x|`` and widening tenfold up to six
    times, then runs Illinois false-position steps. Returns ``x`` unchanged
    when no such change is found.
    """
    h = tol + 1e-8 * abs(x)
    for _ in range(6):
        a, b = max(lo, x - h), min(hi, x + h)
        ga, gb = grad(a), grad(b)
        if not (math.isfinite(ga) and math.isfinite(gb)):
            return x
        if ga < 0.0 < gb:
            break
        h *= 10.0
    else:
        return x
    side = 0
    c = x
    for _ in range(60):
        c = (a * gb - b * ga) / (gb - ga)
        if not a < c < b:
            c = 0.5 * (a + b)
        gc = grad(c)
        if not math.isfinite(gc) or gc == 0.0 or b - a <= 4.0 * 2.220446049250313e-16 * abs(c):
            break
        if (gc < 0.0) == (ga < 0.0):
            a, ga = c, gc
            if side == -1:
                gb *= 0.5
            side = -1
        else:
            b, gb = c, gc
            if side == 1:
                ga *= 0.5
            side = 1
    return c


def objective(kind, xs, theta):
    return make_objective(kind, xs)(float(theta))


def scan_grid(lo, hi):
    step = (math.log(hi) - math.log(lo)) / (SCAN_POINTS - 1)
    grid = np.exp(math.log(lo) + step * np.arange(SCAN_POINTS))
    grid[0], grid[-1] = lo, hi
    return grid


def fit_theta(kind, xs, lo, hi, tol, max_evals):
    """Minimize objective ``kind`` on ``[lo, hi]``.

    Returns ``(theta, value, evaluations, status)``; ``status`` is ``OK``,
    ``NONFINITE`` (``theta`` then holds the offending abscissa) or
    ``BUDGET``.
    """
    obj = make_objective(kind, xs)
    grid = scan_grid(lo, hi)
    vals = np.array([obj(g) for g in grid])
    vals[~np.isfinite(vals)] = np.inf
    i = int(np.argmin(vals))
    if not np.isfinite(vals[i]):
        return lo, math.nan, SCAN_POINTS, NONFINITE
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, SCAN_POINTS - 1)]
    try:
        res = minimize_scalar(obj, Bracket(a, b, tol), max_evals=max_evals - SCAN_POINTS)
    except EvaluationError as exc:
        return exc.abscissa, math.nan, max_evals, NONFINITE
    except ConvergenceError:
        return math.nan, math.nan, max_evals, BUDGET
    nfev = SCAN_POINTS + res.nfev
    if vals[i] < res.fun:
        return float(grid[i]), float(vals[i]), nfev, OK
    grad = make_gradient(kind, xs)
    theta, value = res.x, res.fun
    if grad is not None:
        theta = polish(grad, res.x, lo, hi, tol)
        value = obj(theta)
    return theta, value, nfev, OK


def fit_batch(kind, rows, lo, hi, tol, max_evals):
    rows = np.asarray(rows, dtype=float)
    m = rows.shape[0]
    theta = np.empty(m)
    value = np.empty(m)
    nfev = np.empty(m, dtype=np.int64)
    status = np.empty(m, dtype=np.int64)
    for r in range(m):
        theta[r], value[r], nfev[r], status[r] = fit_theta(kind, rows[r], lo, hi, tol, max_evals)
    return theta, value, nfev, status
