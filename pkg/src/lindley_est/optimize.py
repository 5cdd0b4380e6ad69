"""Bounded one-dimensional minimization and root finding (Brent)."""
from dataclasses import dataclass
import math
from typing import Callable, NamedTuple

from .errors import BracketError, ConvergenceError, DomainError, EvaluationError

_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))
_EPS = 2.220446049250313e-16
DEFAULT_TOL = 1e-8
MAX_EVALS = 10_000


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise DomainError(f"invalid bracket [{self.lo}, {self.hi}]")
        if not self.tol > 0.0:
            raise DomainError("bracket tolerance must be positive")


class MinimizeResult(NamedTuple):
    x: float
    fun: float
    nfev: int


def minimize_scalar(objective: Callable[[float], float], bracket: Bracket,
                    max_evals: int = MAX_EVALS) -> MinimizeResult:
    """Minimize ``objective`` on ``[bracket.lo, bracket.hi]``.

    Golden-section search accelerated by successive parabolic interpolation
    (Brent's ``localmin``).  The returned abscissa is within ``bracket.tol``
    of a local minimizer; for a unimodal objective that is the global one on
    the bracket.

    Raises
    ------
    EvaluationError
        The objective returned a non-finite value.
    ConvergenceError
        More than ``max_evals`` evaluations were needed.
    """
    a, b, tol = float(bracket.lo), float(bracket.hi), float(bracket.tol)
    nfev = 0

    def f(u):
        nonlocal nfev
        if nfev >= max_evals:
            raise ConvergenceError(f"evaluation budget of {max_evals} exhausted")
        nfev += 1
        val = float(objective(u))
        if not math.isfinite(val):
            raise EvaluationError(f"objective is {val} at {u!r}", abscissa=u)
        return val

    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = f(x)
    d = e = 0.0
    while True:
        xm = 0.5 * (a + b)
        tol1 = 2.0 * _EPS * abs(x) + tol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (b - a):
            break
        golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            r, e = e, d
            if abs(p) < abs(0.5 * q * r) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < xm else -tol1
                golden = False
        if golden:
            e = (a - x) if x >= xm else (b - x)
            d = _GOLDEN * e
        u = x + (d if abs(d) >= tol1 else math.copysign(tol1, d))
        fu = f(u)
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return MinimizeResult(x, fx, nfev)


def find_root(f: Callable[[float], float], bracket: Bracket,
              max_evals: int = MAX_EVALS) -> float:
    """Root of ``f`` inside a sign-changing bracket (Brent's ``zeroin``)."""
    a, b, tol = float(bracket.lo), float(bracket.hi), float(bracket.tol)
    fa, fb = float(f(a)), float(f(b))
    nfev = 2
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise EvaluationError("non-finite value at a bracket endpoint",
                              abscissa=a if not math.isfinite(fa) else b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise BracketError(f"no sign change on [{a}, {b}]")
    c, fc = a, fa
    d = e = b - a
    while True:
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * tol
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p, q = 2.0 * m * s, 1.0 - s
            else:
                q, r = fa / fc, fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, m)
        if nfev >= max_evals:
            raise ConvergenceError(f"evaluation budget of {max_evals} exhausted")
        fb = float(f(b))
        nfev += 1
        if not math.isfinite(fb):
            raise EvaluationError(f"function is {fb} at {b!r}", abscissa=b)
