"""The Lindley(theta) distribution.

Density ``theta^2/(1+theta) (1+x) exp(-theta x)`` on ``x > 0``: a mixture of
Exponential(theta) with weight ``theta/(1+theta)`` and Gamma(2, theta) with
weight ``1/(1+theta)``.  The CDF is evaluated through that mixture so it keeps
full relative accuracy for small ``theta * x`` (the Anderson-Darling objective
takes its logarithm).

Random draws use numpy's PCG64 bit generator.  Independent substreams for
replication ``r`` of a study seeded with ``master`` come from
``SeedSequence([master, *index])``, so a draw depends only on its index and
never on execution order.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError
from .special import log_binom

_SEED_MASK = (1 << 64) - 1


def check_theta(theta):
    theta = float(theta)
    if not math.isfinite(theta) or theta <= 0.0:
        raise DomainError(f"theta must be finite and > 0, got {theta!r}")
    return theta


def _as_x(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("x must not be NaN")
    return arr


def _out(arr):
    return float(arr) if arr.ndim == 0 else arr


def pdf(x, theta):
    """Lindley density; zero for ``x < 0``."""
    theta = check_theta(theta)
    x = _as_x(x)
    with np.errstate(over="ignore", invalid="ignore"):
        val = theta * theta / (1.0 + theta) * (1.0 + x) * np.exp(-theta * x)
    val = np.where(x < 0.0, 0.0, val)
    val = np.where(np.isposinf(x), 0.0, val)
    return _out(val)


def _gamma2_cdf(u):
    # 1 - e^{-u}(1+u); below u = 0.5 use e^{-u} * (u^2/2)(1 + u/3(1 + u/4(...)))
    u = np.asarray(u, dtype=float)
    small = u < 0.5
    us = np.where(small, u, 0.0)
    horner = np.ones_like(us)
    for k in range(22, 2, -1):
        horner = 1.0 + us / k * horner
    series = np.exp(-us) * 0.5 * us * us * horner
    with np.errstate(over="ignore", invalid="ignore"):
        direct = -np.expm1(-u) - u * np.exp(-u)
    return np.where(small, series, direct)


def cdf(x, theta):
    """Lindley CDF; zero for ``x <= 0`` and one at ``+inf``."""
    theta = check_theta(theta)
    x = _as_x(x)
    u = theta * np.where(x > 0.0, x, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        w = theta / (1.0 + theta)
        val = w * -np.expm1(-u) + (1.0 - w) * _gamma2_cdf(u)
    val = np.where(np.isposinf(x), 1.0, val)
    val = np.where(x <= 0.0, 0.0, val)
    return _out(val)


def survival(x, theta):
    """``1 - cdf`` evaluated directly as ``(1+theta+theta x) e^{-theta x}/(1+theta)``."""
    theta = check_theta(theta)
    x = _as_x(x)
    xp = np.where(x > 0.0, x, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        val = (1.0 + theta + theta * xp) * np.exp(-theta * xp) / (1.0 + theta)
    val = np.where(np.isposinf(x), 0.0, val)
    return _out(val)


def log_survival(x, theta):
    """Natural log of :func:`survival`, finite for every finite ``x``."""
    theta = check_theta(theta)
    x = _as_x(x)
    xp = np.where(x > 0.0, x, 0.0)
    return _out(np.log1p(theta * xp / (1.0 + theta)) - theta * xp)


def cdf_dtheta(x, theta):
    """Partial derivative of the CDF with respect to theta.

    Uses ``theta x e^{-theta x} ((1+theta)(1+x) + 1) / (1+theta)^2``, which is
    the same function as the two-term expression usually quoted for the
    Cramer-von Mises and Anderson-Darling normal equations, but free of
    cancellation.
    """
    theta = check_theta(theta)
    x = _as_x(x)
    if np.any(x < 0.0):
        raise DomainError("cdf_dtheta requires x >= 0")
    with np.errstate(over="ignore", invalid="ignore"):
        val = (
            theta * x * np.exp(-theta * x)
            * ((1.0 + theta) * (1.0 + x) + 1.0)
            / (1.0 + theta) ** 2
        )
    val = np.where(np.isposinf(x), 0.0, val)
    return _out(val)


def quantile(q, theta, tol=1e-14):
    """Inverse CDF by a safeguarded Newton iteration.

    The root is bracketed on ``[0, hi]`` with ``hi`` doubled until
    ``cdf(hi) > q``; any Newton step leaving the bracket is replaced by
    bisection.
    """
    theta = check_theta(theta)
    q = float(q)
    if not (0.0 < q < 1.0):
        raise DomainError(f"quantile requires 0 < q < 1, got {q!r}")
    lo, hi = 0.0, 1.0 / theta
    while cdf(hi, theta) <= q:
        lo, hi = hi, 2.0 * hi
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = cdf(x, theta) - q
        if fx > 0.0:
            hi = x
        else:
            lo = x
        d = pdf(x, theta)
        step = fx / d if d > 0.0 else math.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * max(x_new, 1e-300) or hi - lo <= tol * hi:
            return x_new
        x = x_new
    return x


def substream(master_seed, *index):
    """Generator for the substream keyed by ``(master_seed, *index)``."""
    entropy = [int(master_seed) & _SEED_MASK] + [int(i) for i in index]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def draw(shape, theta, rng):
    """Lindley variates of the given ``shape`` from generator ``rng``.

    Each variate is Exponential(theta) with probability theta/(1+theta),
    otherwise the sum of two Exponential(theta) draws.
    """
    theta = check_theta(theta)
    e1 = rng.standard_exponential(shape)
    e2 = rng.standard_exponential(shape)
    u = rng.random(shape)
    single = u < theta / (1.0 + theta)
    return (e1 + np.where(single, 0.0, e2)) / theta


def sample(n, theta, seed):
    """Draw a :class:`Sample` of size ``n``.

    ``seed`` may be an integer, a ``SeedSequence`` or a ``Generator``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(
        seed if isinstance(seed, np.random.SeedSequence) else int(seed) & _SEED_MASK
    )
    return Sample(draw(int(n), theta, rng))


def sum_weights(n, theta):
    """Mixture weights ``C(n,k) theta^k / (1+theta)^n`` for ``k = 0..n``."""
    theta = check_theta(theta)
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    k = np.arange(n + 1, dtype=float)
    return np.exp(log_binom(n, k) + k * math.log(theta) - n * math.log1p(theta))


def sum_pdf(t, n, theta):
    """Density of the sum of ``n`` iid Lindley(theta) variables.

    A binomial mixture of Gamma(2n-k, theta) densities, accumulated in log
    space so large ``n`` does not underflow.
    """
    theta = check_theta(theta)
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    t_arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr <= 0.0):
        raise DomainError("sum_pdf requires finite t > 0")
    k = np.arange(n + 1, dtype=float)
    shape = 2.0 * n - k
    log_w = log_binom(n, k) + k * math.log(theta) - n * math.log1p(theta)
    tt = t_arr[..., None]
    log_g = (
        shape * math.log(theta) + (shape - 1.0) * np.log(tt) - theta * tt
        - np.array([math.lgamma(s) for s in shape])
    )
    return _out(np.exp(logsumexp(log_w + log_g, axis=-1)))


@dataclass(frozen=True)
class Sample:
    """A finite sample of positive observations.

    ``t`` is the exactly rounded sum (``math.fsum``) so it does not depend on
    the order of ``values``; ``sorted_view`` holds the order statistics.
    """

    values: np.ndarray
    n: int = field(init=False)
    t: float = field(init=False)
    sorted_view: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size < 1:
            raise DomainError("a sample needs at least one observation")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
            raise DomainError("sample values must be finite and > 0")
        vals.setflags(write=False)
        srt = np.sort(vals, kind="stable")
        srt.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "n", int(vals.size))
        object.__setattr__(self, "t", math.fsum(vals))
        object.__setattr__(self, "sorted_view", srt)

    @property
    def mean(self):
        return self.t / self.n
