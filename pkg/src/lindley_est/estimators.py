"""Point estimators of the Lindley parameter.

The MLE has a closed form.  The percentile, least-squares, weighted
least-squares, Cramer-von Mises and Anderson-Darling estimators minimize a
discrepancy between the model CDF at the order statistics and a set of
plotting positions; the minimization runs in the compiled kernel when it is
available.
"""
from dataclasses import dataclass
import enum
import math
from typing import Optional

import numpy as np

from . import _backend, _purefit
from .distribution import Sample, cdf, cdf_dtheta, survival
from .errors import ConvergenceError, DomainError, EvaluationError

DEFAULT_BRACKET = (1e-6, 100.0)
EXPANDED_BRACKET = (1e-9, 1e4)
DEFAULT_TOL = 1e-8
MAX_EVALS = 10_000


class EstimatorKind(str, enum.Enum):
    MLE = "MLE"
    UMVUE = "UMVUE"
    PCE = "PCE"
    LSE = "LSE"
    WLSE = "WLSE"
    CVME = "CVME"
    ADE = "ADE"

    @classmethod
    def parse(cls, name):
        try:
            return cls(str(name).upper())
        except ValueError:
            raise DomainError(f"unknown estimator {name!r}") from None

    @property
    def order(self):
        return list(EstimatorKind).index(self)


THETA_METHODS = (
    EstimatorKind.MLE, EstimatorKind.PCE, EstimatorKind.LSE,
    EstimatorKind.WLSE, EstimatorKind.CVME, EstimatorKind.ADE,
)
MINIMUM_DISTANCE = THETA_METHODS[1:]

_KERNEL_CODE = {
    EstimatorKind.PCE: _purefit.PCE,
    EstimatorKind.LSE: _purefit.LSE,
    EstimatorKind.WLSE: _purefit.WLSE,
    EstimatorKind.CVME: _purefit.CVME,
    EstimatorKind.ADE: _purefit.ADE,
}
_MIN_N = {
    EstimatorKind.PCE: 2, EstimatorKind.LSE: 2, EstimatorKind.WLSE: 2,
    EstimatorKind.CVME: 1, EstimatorKind.ADE: 1,
}


@dataclass(frozen=True)
class ThetaEstimate:
    theta_hat: float
    method: EstimatorKind
    objective_value: Optional[float] = None
    evaluations: int = 0
    converged: bool = True
    bracket: Optional[tuple] = None


@dataclass(frozen=True)
class PlottingPositions:
    """Expected CDF values ``i/(n+1)`` of the order statistics and the
    inverse-variance weights used by weighted least squares."""

    n: int

    @property
    def positions(self):
        return np.arange(1, self.n + 1) / (self.n + 1.0)

    @property
    def weights(self):
        j = np.arange(1, self.n + 1, dtype=float)
        return (self.n + 1.0) ** 2 * (self.n + 2.0) / (j * (self.n - j + 1.0))


def _as_sample(s):
    return s if isinstance(s, Sample) else Sample(s)


def g_of_t(t, n):
    """MLE of theta as a function of the sample sum ``t`` and size ``n``."""
    t = float(t)
    if not math.isfinite(t) or t <= 0.0 or int(n) != n or n < 1:
        raise DomainError("g_of_t requires t > 0 and integer n >= 1")
    return (-(t - n) + math.sqrt((t - n) ** 2 + 8.0 * t * n)) / (2.0 * t)


def g_of_t_array(t, n):
    """Vectorized :func:`g_of_t`; same arithmetic, elementwise."""
    t = np.asarray(t, dtype=float)
    return (-(t - n) + np.sqrt((t - n) ** 2 + 8.0 * t * n)) / (2.0 * t)


def mle(s):
    s = _as_sample(s)
    return ThetaEstimate(g_of_t(s.t, s.n), EstimatorKind.MLE)


# Objectives, exposed for inspection and grid-search checks. Each takes the
# sorted sample and theta.

def pce_objective(xs, theta, literal=False):
    """Squared log-survival mismatch against ``log(1 - i/(n+1))``.

    ``literal=True`` flips the sign of the ``theta * x`` term, reproducing a
    commonly printed variant of this objective that does not match
    ``log(1 - F)``.
    """
    kind = _purefit.PCE_LITERAL if literal else _purefit.PCE
    return _purefit.objective(kind, np.asarray(xs, dtype=float), theta)


def pce_residuals(xs, theta):
    xs = np.asarray(xs, dtype=float)
    p = PlottingPositions(xs.size).positions
    return np.log1p(-p) - (np.log1p(theta * xs / (1.0 + theta)) - theta * xs)


def lse_objective(xs, theta):
    return _purefit.objective(_purefit.LSE, np.asarray(xs, dtype=float), theta)


def wlse_objective(xs, theta):
    return _purefit.objective(_purefit.WLSE, np.asarray(xs, dtype=float), theta)


def cvme_objective(xs, theta):
    return _purefit.objective(_purefit.CVME, np.asarray(xs, dtype=float), theta)


def ade_objective(xs, theta):
    return _purefit.objective(_purefit.ADE, np.asarray(xs, dtype=float), theta)


OBJECTIVES = {
    EstimatorKind.PCE: pce_objective,
    EstimatorKind.LSE: lse_objective,
    EstimatorKind.WLSE: wlse_objective,
    EstimatorKind.CVME: cvme_objective,
    EstimatorKind.ADE: ade_objective,
}


def cvme_stationarity(xs, theta):
    """Left side of the CvM normal equation at ``theta``."""
    xs = np.sort(np.asarray(xs, dtype=float))
    n = xs.size
    p = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    return float(np.sum((cdf(xs, theta) - p) * cdf_dtheta(xs, theta)))


def ade_stationarity(xs, theta):
    """Left side of the AD normal equation at ``theta``."""
    xs = np.sort(np.asarray(xs, dtype=float))
    n = xs.size
    c = 2.0 * np.arange(1, n + 1) - 1.0
    rev = xs[::-1]
    return float(np.sum(c * (cdf_dtheta(xs, theta) / cdf(xs, theta)
                             - cdf_dtheta(rev, theta) / survival(rev, theta))))


def _near_edge(theta, lo, hi, tol):
    slack = 4.0 * tol + 1e-9 * abs(theta)
    return theta - lo <= slack or hi - theta <= slack


def _fit_sorted(kind, xs, literal=False, tol=DEFAULT_TOL):
    code = _purefit.PCE_LITERAL if literal else _KERNEL_CODE[kind]
    # the compatibility variant is only wired through the pure kernel
    kern = _purefit if literal else _backend.kernels
    lo, hi = DEFAULT_BRACKET
    theta, value, nfev, status = kern.fit_theta(code, xs, lo, hi, tol, MAX_EVALS)
    if status == _purefit.OK and _near_edge(theta, lo, hi, tol):
        lo, hi = EXPANDED_BRACKET
        theta, value, nfev2, status = kern.fit_theta(code, xs, lo, hi, tol, MAX_EVALS)
        nfev += nfev2
    if status == _purefit.NONFINITE:
        raise EvaluationError(f"{kind.value} objective is not finite at theta={theta!r}",
                              abscissa=theta)
    if status == _purefit.BUDGET:
        raise ConvergenceError(f"{kind.value} fit exhausted {MAX_EVALS} evaluations")
    converged = not _near_edge(theta, lo, hi, tol)
    return ThetaEstimate(float(theta), kind, float(value), int(nfev), converged, (lo, hi))


def _min_distance(kind, s, **kw):
    s = _as_sample(s)
    if s.n < _MIN_N[kind]:
        raise DomainError(f"{kind.value} needs at least {_MIN_N[kind]} observations")
    return _fit_sorted(kind, s.sorted_view, **kw)


def pce(s, literal=False):
    return _min_distance(EstimatorKind.PCE, s, literal=literal)


def lse(s):
    return _min_distance(EstimatorKind.LSE, s)


def wlse(s):
    return _min_distance(EstimatorKind.WLSE, s)


def cvme(s):
    return _min_distance(EstimatorKind.CVME, s)


def ade(s):
    return _min_distance(EstimatorKind.ADE, s)


_FITTERS = {
    EstimatorKind.MLE: mle,
    EstimatorKind.PCE: pce,
    EstimatorKind.LSE: lse,
    EstimatorKind.WLSE: wlse,
    EstimatorKind.CVME: cvme,
    EstimatorKind.ADE: ade,
}


def estimate(s, method):
    """Fit ``method`` (an :class:`EstimatorKind` or its name) to ``s``."""
    kind = EstimatorKind.parse(method) if not isinstance(method, EstimatorKind) else method
    if kind is EstimatorKind.UMVUE:
        raise DomainError("UMVUE estimates f and F directly; it has no theta estimate")
    return _FITTERS[kind](s)


def fit_rows(method, rows):
    """Fit ``method`` to each row of a 2-D array of sorted samples.

    Returns an array of estimates with NaN where the fit failed.  Used by the
    simulation harness; rows landing on the default bracket edge are refit
    individually on the expanded bracket, exactly as :func:`estimate` does.
    """
    kind = EstimatorKind.parse(method) if not isinstance(method, EstimatorKind) else method
    rows = np.ascontiguousarray(rows, dtype=float)
    if kind is EstimatorKind.MLE:
        return g_of_t_array(np.array([math.fsum(r) for r in rows]), rows.shape[1])
    if rows.shape[1] < _MIN_N[kind]:
        raise DomainError(f"{kind.value} needs at least {_MIN_N[kind]} observations")
    lo, hi = DEFAULT_BRACKET
    theta, _, _, status = _backend.kernels.fit_batch(
        _KERNEL_CODE[kind], rows, lo, hi, DEFAULT_TOL, MAX_EVALS)
    theta = np.where(status == _purefit.OK, theta, np.nan)
    edge = np.isfinite(theta) & ((theta - lo <= 4.0 * DEFAULT_TOL + 1e-9 * theta)
                                 | (hi - theta <= 4.0 * DEFAULT_TOL + 1e-9 * theta))
    for r in np.flatnonzero(edge):
        try:
            theta[r] = _fit_sorted(kind, rows[r]).theta_hat
        except (EvaluationError, ConvergenceError):
            theta[r] = np.nan
    return theta
