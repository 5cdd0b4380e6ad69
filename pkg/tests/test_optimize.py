import math

import pytest

from lindley_est.errors import BracketError, ConvergenceError, DomainError, EvaluationError
from lindley_est.optimize import Bracket, find_root, minimize_scalar


def test_quadratic():
    res = minimize_scalar(lambda t: (t - 2.0) ** 2, Bracket(0.0, 10.0))
    assert abs(res.x - 2.0) <= 1e-8
    assert res.fun == (res.x - 2.0) ** 2
    assert res.nfev > 0


def test_non_smooth():
    res = minimize_scalar(lambda t: abs(t - 1.0), Bracket(0.0, 5.0))
    assert abs(res.x - 1.0) <= 1e-8


def test_log_barrier():
    res = minimize_scalar(lambda t: t - math.log(t), Bracket(0.01, 10.0))
    assert abs(res.x - 1.0) <= 1e-8


def test_minimizer_at_edge():
    res = minimize_scalar(lambda t: t, Bracket(1.0, 3.0))
    assert abs(res.x - 1.0) <= 1e-8


def test_deterministic():
    f = lambda t: math.cos(t) + 0.1 * t  # noqa: E731
    a = minimize_scalar(f, Bracket(0.0, 6.0))
    b = minimize_scalar(f, Bracket(0.0, 6.0))
    assert a == b


def test_non_finite_reports_abscissa():
    with pytest.raises(EvaluationError) as info:
        minimize_scalar(lambda t: math.nan if t > 1.0 else t, Bracket(0.0, 10.0))
    assert info.value.abscissa > 1.0


def test_budget():
    with pytest.raises(ConvergenceError):
        minimize_scalar(lambda t: (t - 2.0) ** 2, Bracket(0.0, 10.0), max_evals=3)


@pytest.mark.parametrize("lo, hi, tol", [(1.0, 1.0, 1e-8), (2.0, 1.0, 1e-8), (0.0, 1.0, 0.0),
                                         (0.0, math.inf, 1e-8)])
def test_bracket_validation(lo, hi, tol):
    with pytest.raises(DomainError):
        Bracket(lo, hi, tol)


def test_roots():
    assert find_root(lambda t: t - 3.0, Bracket(0.0, 10.0)) == pytest.approx(3.0, abs=1e-8)
    assert find_root(lambda t: t * t - 2.0, Bracket(0.0, 2.0)) == pytest.approx(math.sqrt(2.0), abs=1e-8)
    assert find_root(lambda t: 2.0 * (t - 2.0), Bracket(0.0, 10.0)) == pytest.approx(2.0, abs=1e-8)


def test_root_requires_sign_change():
    with pytest.raises(BracketError):
        find_root(lambda t: t * t + 1.0, Bracket(-1.0, 1.0))
