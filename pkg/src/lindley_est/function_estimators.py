"""Estimators of the Lindley density and CDF at a point.

Plug-in estimators substitute a fitted theta into the closed forms.  The
UMVUEs are the conditional density (and its integral) of one observation
given the sample sum ``t``:

    f_hat(x) = (1+x)/A_n(t) * sum_k C_k (t-x)^(2n-3-k),   0 < x < t

with ``C_k = C(n-1,k)/Gamma(2n-2-k)`` and
``A_n(t) = sum_j C(n,j) t^(2n-j-1)/Gamma(2n-j)``.  Both sums are evaluated
in log space; every term is positive so no cancellation occurs.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import gammaln, logsumexp

from .distribution import Sample, cdf, pdf
from .errors import DomainError
from .estimators import EstimatorKind, estimate
from .special import log_binom, reg_inc_beta


def plugin_pdf(x, theta_hat):
    return pdf(x, theta_hat)


def plugin_cdf(x, theta_hat):
    return cdf(x, theta_hat)


def _check_n(n):
    if int(n) != n or n < 2:
        raise DomainError(f"the UMVUE needs n >= 2, got {n!r}")
    return int(n)


def log_coefficients(n):
    """``log C_{k,n}`` for ``k = 0..n-1``."""
    n = _check_n(n)
    k = np.arange(n, dtype=float)
    return log_binom(n - 1, k) - gammaln(2.0 * n - 2.0 - k)


def log_normalizer(t, n):
    """``log A_n(t)``; ``t`` may be an array."""
    n = _check_n(n)
    t = np.asarray(t, dtype=float)
    j = np.arange(n + 1, dtype=float)
    terms = (log_binom(n, j) - gammaln(2.0 * n - j)
             + (2.0 * n - j - 1.0) * np.log(t)[..., None])
    out = logsumexp(terms, axis=-1)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class UmvueContext:
    """Sufficient statistic ``(t, n)`` with its cached coefficients."""

    t: float
    n: int
    log_coeffs: np.ndarray = field(init=False, repr=False)
    log_a: float = field(init=False)

    def __post_init__(self):
        t = float(self.t)
        if not math.isfinite(t) or t <= 0.0:
            raise DomainError("the sample sum must be finite and > 0")
        n = _check_n(self.n)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "log_coeffs", log_coefficients(n))
        object.__setattr__(self, "log_a", log_normalizer(t, n))

    @classmethod
    def from_sample(cls, s):
        s = s if isinstance(s, Sample) else Sample(s)
        return cls(s.t, s.n)

    def pdf(self, x):
        return umvue_pdf(x, self)

    def cdf(self, x):
        return umvue_cdf(x, self)


def umvue_pdf_values(x, t, n):
    """UMVUE of the density at ``x`` given sums ``t``; broadcasts ``x``
    against ``t``."""
    n = _check_n(n)
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    inside = (x >= 0.0) & (x < t)
    xi = np.where(inside, x, 0.0)
    ti = np.where(inside, t, 1.0)
    k = np.arange(n, dtype=float)
    expo = 2.0 * n - 3.0 - k
    with np.errstate(divide="ignore", invalid="ignore"):
        log_tx = np.log(ti - xi)[..., None]
        # the k = n-1 term has exponent n-2, which is 0 when n = 2
        terms = log_coefficients(n) + np.where(expo == 0.0, 0.0, expo * log_tx)
    val = (1.0 + xi) * np.exp(logsumexp(terms, axis=-1) - log_normalizer(ti, n))
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def umvue_cdf_values(x, t, n):
    """UMVUE of the CDF at ``x`` given sums ``t``; broadcasts ``x`` against
    ``t``."""
    n = _check_n(n)
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    inside = (x > 0.0) & (x < t)
    out = np.where(x >= t, 1.0, 0.0)
    if np.any(inside):
        xi, ti = x[inside], t[inside]
        k = np.arange(n, dtype=float)
        b = 2.0 * n - 2.0 - k
        y = (xi / ti)[:, None]
        i1 = reg_inc_beta(y, 1.0, b)
        i2 = reg_inc_beta(y, 2.0, b)
        bracket = i1 / b + ti[:, None] * i2 / ((b + 1.0) * b)
        with np.errstate(divide="ignore"):
            terms = log_coefficients(n) + b * np.log(ti)[:, None] + np.log(bracket)
        val = np.exp(logsumexp(terms, axis=-1) - log_normalizer(ti, n))
        out[inside] = np.clip(val, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def umvue_pdf(x, ctx):
    return umvue_pdf_values(x, ctx.t, ctx.n)


def umvue_cdf(x, ctx):
    return umvue_cdf_values(x, ctx.t, ctx.n)


@dataclass(frozen=True)
class EstimatedCurvePoint:
    x: float
    pdf_hat: float
    cdf_hat: float
    method: EstimatorKind


def estimate_curve(s, method, grid):
    """Estimated ``(pdf, cdf)`` arrays over ``grid`` for one method."""
    s = s if isinstance(s, Sample) else Sample(s)
    kind = method if isinstance(method, EstimatorKind) else EstimatorKind.parse(method)
    grid = np.asarray(grid, dtype=float)
    if kind is EstimatorKind.UMVUE:
        ctx = UmvueContext.from_sample(s)
        return umvue_pdf(grid, ctx), umvue_cdf(grid, ctx)
    theta = estimate(s, kind).theta_hat
    return plugin_pdf(grid, theta), plugin_cdf(grid, theta)


def curve_points(s, method, grid):
    kind = method if isinstance(method, EstimatorKind) else EstimatorKind.parse(method)
    f, F = estimate_curve(s, kind, grid)
    return [EstimatedCurvePoint(float(x), float(a), float(b), kind)
            for x, a, b in zip(np.atleast_1d(grid), np.atleast_1d(f), np.atleast_1d(F))]
