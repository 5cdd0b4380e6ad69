import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lindley_est import _purefit
from lindley_est.distribution import Sample, cdf, cdf_dtheta, quantile, sample
from lindley_est.errors import DomainError
from lindley_est.estimators import (
    OBJECTIVES, EstimatorKind, PlottingPositions, ade, ade_objective, ade_stationarity,
    cvme, cvme_stationarity, estimate, fit_rows, g_of_t, lse,
    mle, pce, pce_objective, pce_residuals, wlse,
)
from lindley_est.risk import deriv_g

GRID = np.linspace(0.01, 20.0, 2000)


def _mp_survival(x, theta):
    x, th = mpmath.mpf(float(x)), mpmath.mpf(theta)
    return (1 + th * x / (1 + th)) * mpmath.exp(-th * x)


def perfect(levels, theta=1.0):
    return Sample([quantile(q, theta) for q in levels])


def test_mle_examples():
    assert mle(Sample([1.0, 1.0, 1.0])).theta_hat == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert mle(Sample([1.0, 2.0, 3.0])).theta_hat == pytest.approx((-1 + math.sqrt(17)) / 4, rel=1e-15)
    s = sample(37, 0.8, 5)
    est = mle(s)
    assert est.theta_hat == g_of_t(s.t, s.n)
    assert est.objective_value is None


def test_g_of_t():
    for n in (1, 3, 10):
        assert g_of_t(n, n) == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert g_of_t(6.0, 3) == pytest.approx((-3 + math.sqrt(153)) / 12, rel=1e-15)
    assert g_of_t(6.0, 3) == pytest.approx(0.7807764, abs=1e-7)
    t = np.linspace(0.1, 100.0, 500)
    vals = np.array([g_of_t(v, 5) for v in t])
    assert np.all(np.diff(vals) < 0.0) and np.all(vals > 0.0)
    assert all(deriv_g(v, 5) < 0.0 for v in t)
    with pytest.raises(DomainError):
        g_of_t(0.0, 3)


def test_plotting_positions():
    pp = PlottingPositions(3)
    np.testing.assert_allclose(pp.positions, [0.25, 0.5, 0.75])
    np.testing.assert_allclose(pp.weights, [80.0 / 3.0, 20.0, 80.0 / 3.0])
    w = PlottingPositions(17).weights
    np.testing.assert_allclose(w, w[::-1])
    assert np.all(w > 0)


@pytest.mark.parametrize("fit", [lse, wlse, pce])
def test_perfect_plotting_positions(fit):
    s = perfect(np.arange(1, 51) / 51.0)
    est = fit(s)
    assert est.theta_hat == pytest.approx(1.0, abs=1e-4)
    assert est.objective_value == pytest.approx(0.0, abs=1e-12)
    assert est.converged


def test_cvme_perfect_midpoints():
    n = 50
    s = perfect((2 * np.arange(1, n + 1) - 1) / (2.0 * n))
    est = cvme(s)
    assert est.theta_hat == pytest.approx(1.0, abs=1e-4)
    assert est.objective_value == pytest.approx(1.0 / (12 * n), abs=1e-12)


def test_ade_perfect_plotting_positions():
    s = perfect(np.arange(1, 201) / 201.0)
    est = ade(s)
    assert est.theta_hat == pytest.approx(1.0, abs=0.02)
    vals = [ade_objective(s.sorted_view, g) for g in GRID]
    assert est.objective_value <= min(vals)


@pytest.mark.parametrize("fit", [lse, wlse, pce])
def test_small_samples_rejected(fit):
    with pytest.raises(DomainError):
        fit(Sample([1.3]))


def test_cvme_ade_accept_one_observation():
    assert cvme(Sample([1.3])).theta_hat > 0
    assert ade(Sample([1.3])).theta_hat > 0


def test_pce_residual_identity():
    xs = np.sort(sample(30, 1.4, 8).values)
    p = PlottingPositions(30).positions
    for theta in (0.3, 1.4, 6.0):
        direct = np.array([
            float(mpmath.log(1 - mpmath.mpf(pi)) - mpmath.log(_mp_survival(x, theta)))
            for pi, x in zip(p, xs)
        ])
        np.testing.assert_allclose(pce_residuals(xs, theta), direct, atol=1e-12)
        assert pce_objective(xs, theta) == pytest.approx(np.sum(direct ** 2), rel=1e-12)


def test_pce_literal_variant_runs_to_the_bracket_edge():
    # the sign-flipped residual is not a log-survival mismatch; it degenerates
    s = sample(40, 1.0, 21)
    est = pce(s, literal=True)
    assert est.theta_hat < 1e-5
    assert pce(s).theta_hat == pytest.approx(1.0, abs=0.5)


@pytest.mark.parametrize("seed", range(6))
def test_stationarity_at_optimum(seed):
    s = sample(60, [0.5, 1.0, 3.0][seed % 3], 300 + seed)
    c = cvme(s)
    assert abs(cvme_stationarity(s.values, c.theta_hat)) <= 1e-6
    a = ade(s)
    assert abs(ade_stationarity(s.values, a.theta_hat)) <= 1e-6
    l = lse(s)
    xs = s.sorted_view
    p = PlottingPositions(s.n).positions
    grad = np.sum((cdf(xs, l.theta_hat) - p) * cdf_dtheta(xs, l.theta_hat))
    assert abs(grad) <= 1e-6


@pytest.mark.parametrize("kind", list(OBJECTIVES))
def test_grid_search_oracle(kind):
    rng = np.random.default_rng(77)
    for _ in range(6):
        s = sample(int(rng.integers(5, 90)), float(rng.choice([0.5, 1.0, 3.0])), int(rng.integers(1 << 31)))
        est = estimate(s, kind)
        grid_best = min(OBJECTIVES[kind](s.sorted_view, g) for g in GRID)
        assert est.objective_value <= grid_best


def test_ade_finite_over_wide_theta_range():
    s = sample(50, 1.0, 4)
    for theta in np.geomspace(1e-4, 50.0, 200):
        assert math.isfinite(ade_objective(s.sorted_view, theta))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.01, 30.0), min_size=3, max_size=25), st.randoms())
def test_permutation_invariance(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    for kind in (EstimatorKind.MLE, EstimatorKind.PCE, EstimatorKind.LSE,
                 EstimatorKind.WLSE, EstimatorKind.CVME, EstimatorKind.ADE):
        assert estimate(Sample(values), kind).theta_hat == estimate(Sample(shuffled), kind).theta_hat


def test_estimators_do_not_mutate_input():
    vals = np.array([3.0, 1.0, 2.0, 5.0])
    before = vals.copy()
    for kind in ("MLE", "PCE", "LSE", "WLSE", "CVME", "ADE"):
        estimate(vals, kind)
    assert np.array_equal(vals, before)


def test_umvue_has_no_theta():
    with pytest.raises(DomainError):
        estimate(Sample([1.0, 2.0]), "UMVUE")
    with pytest.raises(DomainError):
        estimate(Sample([1.0, 2.0]), "BAYES")


def test_bracket_expansion_for_tiny_theta():
    # data on the scale of 1e7 put the minimizer below the default bracket
    s = Sample(np.array([0.5, 1.0, 2.0, 3.0, 5.0]) * 2e7)
    est = lse(s)
    assert est.bracket == (1e-9, 1e4)
    assert est.theta_hat < 1e-6
    assert est.converged


def test_fit_rows_matches_single_fits():
    rows = np.sort(np.vstack([sample(25, 1.0, k).values for k in range(8)]), axis=1)
    for kind in ("MLE", "PCE", "LSE", "WLSE", "CVME", "ADE"):
        batch = fit_rows(kind, rows)
        single = [estimate(r, kind).theta_hat for r in rows]
        np.testing.assert_array_equal(batch, single)


def test_consistency_smoke():
    theta0 = 1.0
    for kind in ("MLE", "PCE", "LSE", "WLSE", "CVME", "ADE"):
        medians = []
        for n in (20, 80, 320):
            rows = np.sort(np.vstack([sample(n, theta0, 10_000 * n + r).values
                                      for r in range(200)]), axis=1)
            medians.append(np.median(np.abs(fit_rows(kind, rows) - theta0)))
        assert medians[0] > medians[1] > medians[2], (kind, medians)


def test_kernel_codes_cover_min_distance_methods():
    assert {_purefit.PCE, _purefit.LSE, _purefit.WLSE, _purefit.CVME, _purefit.ADE} == set(range(5))
