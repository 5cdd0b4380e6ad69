"""Exact bias and MSE of the MLE plug-in and UMVUE function estimators.

Both estimators are functions of the sample sum ``T`` alone, so their
moments are one-dimensional integrals against the density of ``T`` (a
binomial mixture of gamma densities).  The integrals run over
``[0, t_max]`` where ``t_max`` leaves less than ``1e-12`` of the heaviest
mixture component, Gamma(2n, theta), in the tail.
"""
from dataclasses import asdict, dataclass
import enum
import math

from scipy.integrate import quad
from scipy.special import gammainccinv

from .distribution import cdf, check_theta, pdf, sum_pdf
from .errors import DomainError, NumericalError
from .estimators import g_of_t
from .function_estimators import umvue_cdf_values, umvue_pdf_values

TAIL_MASS = 1e-12
EPSABS = 1e-10
EPSREL = 1e-8
LIMIT = 500


class Target(str, enum.Enum):
    PDF = "PDF"
    CDF = "CDF"

    @classmethod
    def parse(cls, name):
        try:
            return cls(str(name).upper())
        except ValueError:
            raise DomainError(f"unknown target {name!r}") from None


class RiskEstimator(str, enum.Enum):
    MLE_PLUGIN = "MLE_PLUGIN"
    UMVUE = "UMVUE"

    @classmethod
    def parse(cls, name):
        key = str(name).upper()
        if key == "MLE":
            key = "MLE_PLUGIN"
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown risk estimator {name!r}") from None


@dataclass(frozen=True)
class RiskQuery:
    x: float
    theta: float
    n: int
    target: Target
    estimator: RiskEstimator

    def __post_init__(self):
        object.__setattr__(self, "target", Target.parse(self.target))
        object.__setattr__(self, "estimator", RiskEstimator.parse(self.estimator))
        check_theta(self.theta)
        if not math.isfinite(self.x) or self.x < 0.0:
            raise DomainError("x must be finite and >= 0")
        min_n = 2 if self.estimator is RiskEstimator.UMVUE else 1
        if int(self.n) != self.n or self.n < min_n:
            raise DomainError(f"{self.estimator.value} risk needs n >= {min_n}")


@dataclass(frozen=True)
class RiskResult:
    expectation: float
    bias: float
    mse: float
    quadrature_error_estimate: float
    truncation_point: float
    target_value: float
    mass: float

    def as_dict(self):
        return asdict(self)


def deriv_g(t, n):
    """Derivative of the MLE map ``g(t)`` with respect to the sum ``t``."""
    t = float(t)
    if not math.isfinite(t) or t <= 0.0 or int(n) != n or n < 1:
        raise DomainError("deriv_g requires t > 0 and integer n >= 1")
    root = math.sqrt((t - n) ** 2 + 8.0 * t * n)
    return -n / (2.0 * t * t) + (t + 3.0 * n) / (2.0 * t * root) - root / (2.0 * t * t)


def truncation_point(n, theta):
    return float(gammainccinv(2.0 * n, TAIL_MASS)) / theta


def _integrate(fn, upper, points):
    val, err, info = quad(fn, 0.0, upper, epsabs=EPSABS, epsrel=EPSREL, limit=LIMIT,
                          points=points or None, full_output=1)[:3]
    if not math.isfinite(val) or err > max(10.0 * EPSABS, 10.0 * EPSREL * abs(val)):
        raise NumericalError(
            f"quadrature did not converge (value={val}, error estimate={err})",
            diagnostics={"value": val, "error": err, "subintervals": info.get("last")},
        )
    return val, err


def _risk(q, estimate_at, extra_points=(), weight=None):
    theta, n, x = float(q.theta), int(q.n), float(q.x)
    truth = pdf(x, theta) if q.target is Target.PDF else cdf(x, theta)
    upper = truncation_point(n, theta)
    mean_t = n * (theta + 2.0) / (theta * (theta + 1.0))
    points = sorted({p for p in (mean_t, *extra_points) if 0.0 < p < upper})

    def density(t):
        d = sum_pdf(t, n, theta)
        return d * weight(t) if weight is not None else d

    mass, e0 = _integrate(density, upper, points)
    expectation, e1 = _integrate(lambda t: estimate_at(t) * density(t), upper, points)
    mse, e2 = _integrate(lambda t: (estimate_at(t) - truth) ** 2 * density(t), upper, points)
    return RiskResult(
        expectation=expectation,
        bias=expectation - truth,
        mse=max(mse, 0.0),
        quadrature_error_estimate=e0 + e1 + e2,
        truncation_point=upper,
        target_value=truth,
        mass=mass,
    )


def mle_risk(q, jacobian_factor=False):
    """Expectation, bias and MSE of the MLE plug-in estimator.

    With ``jacobian_factor=True`` every integrand is additionally multiplied by
    ``|g'(t)|``, reproducing a widely printed form of these integrals; the
    default omits it because ``f_T(t) dt`` already is the probability
    element.
    """
    if not isinstance(q, RiskQuery):
        q = RiskQuery(**q)
    if q.estimator is not RiskEstimator.MLE_PLUGIN:
        raise DomainError("mle_risk needs estimator=MLE_PLUGIN")
    x, n = float(q.x), int(q.n)
    h = pdf if q.target is Target.PDF else cdf
    weight = (lambda t: abs(deriv_g(t, n))) if jacobian_factor else None
    return _risk(q, lambda t: h(x, g_of_t(t, n)), weight=weight)


def umvue_risk(q):
    """Expectation, bias and MSE of the UMVUE.

    The estimator is 0 (density) or 1 (CDF) whenever ``t <= x``, so ``t = x``
    is a kink of the integrand and is passed to the integrator as a
    breakpoint.
    """
    if not isinstance(q, RiskQuery):
        q = RiskQuery(**q)
    if q.estimator is not RiskEstimator.UMVUE:
        raise DomainError("umvue_risk needs estimator=UMVUE")
    x, n = float(q.x), int(q.n)
    h = umvue_pdf_values if q.target is Target.PDF else umvue_cdf_values
    return _risk(q, lambda t: h(x, t, n), extra_points=(x,))


def risk(q, jacobian_factor=False):
    if not isinstance(q, RiskQuery):
        q = RiskQuery(**q)
    if q.estimator is RiskEstimator.UMVUE:
        return umvue_risk(q)
    return mle_risk(q, jacobian_factor=jacobian_factor)
