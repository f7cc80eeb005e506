"""Empirical CCDF construction and slope/Hill estimation."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alohasim import ConfigError, NumericError
from alohasim.bounds import BoundKind, bound_curve
from alohasim.distributions import ExponentialPackets
from alohasim.finite import FiniteModelParams
from alohasim.rng import make_stream
from alohasim.tailfit import (
    CcdfPoints,
    empirical_ccdf,
    fit_loglog_slope,
    hill_estimator,
)


def _grid_points(x, survival):
    return CcdfPoints(
        x=np.asarray(x, float), survival=np.asarray(survival, float), sample_count=len(x)
    )


def test_empirical_ccdf_counting():
    pts = empirical_ccdf([1.0, 2.0, 3.0, 4.0])
    assert pts.x.tolist() == [1.0, 2.0, 3.0]  # survival-0 point dropped
    assert pts.survival.tolist() == [0.75, 0.5, 0.25]
    assert pts.sample_count == 4


def test_empirical_ccdf_handles_ties():
    pts = empirical_ccdf([1.0, 1.0, 2.0, 2.0])
    assert pts.x.tolist() == [1.0]
    assert pts.survival.tolist() == [0.5]


def test_constant_samples_are_degenerate():
    pts = empirical_ccdf([5.0, 5.0, 5.0])
    assert pts.degenerate
    with pytest.raises(NumericError):
        fit_loglog_slope(pts)


def test_empirical_ccdf_rejects_tiny_input():
    with pytest.raises(ConfigError):
        empirical_ccdf([1.0])


def test_exponential_survival_value():
    stream = make_stream(71, 0)
    s = ExponentialPackets(1.0).sample_n(stream, 1_000_000)
    pts = empirical_ccdf(s)
    at_one = pts.survival[np.searchsorted(pts.x, 1.0)]
    assert abs(at_one - math.exp(-1.0)) < 0.002


def test_exact_power_grid_slope():
    x = np.arange(2.0, 1001.0)
    fit = fit_loglog_slope(_grid_points(x, x**-2.0), window=(1.0, 1e-9))
    assert abs(fit.slope - (-2.0)) < 1e-9
    assert fit.stderr < 1e-9
    assert fit.reliable


def test_bound_curve_slope_near_minus_one():
    p = FiniteModelParams(M=2, lam=1.0, nu=1.0, packet=ExponentialPackets(1.0))
    ns = np.arange(1, 2001)
    curve = bound_curve(BoundKind.LOWER_N, ns, p)  # exactly 1/(n+1)
    fit = fit_loglog_slope(_grid_points(ns, curve), window=(1e-1, 1e-3))
    assert fit.slope == pytest.approx(-1.0, abs=0.02)


def test_monte_carlo_pareto_slope():
    stream = make_stream(72, 1)
    u = stream.generator.random(100_000)
    samples = 1.0 / u  # survival x^{-1} on x >= 1
    fit = fit_loglog_slope(empirical_ccdf(samples), window=(1e-1, 1e-3))
    assert fit.slope == pytest.approx(-1.0, abs=0.1)


def test_window_validation_and_unreliable_flag():
    x = np.arange(2.0, 1001.0)
    pts = _grid_points(x, x**-2.0)
    with pytest.raises(ConfigError):
        fit_loglog_slope(pts, window=(1e-3, 1e-1))  # reversed
    with pytest.raises(ConfigError):
        fit_loglog_slope(pts, window=(1.5, 0.1))
    with pytest.raises(NumericError):
        fit_loglog_slope(pts, window=(1e-8, 1e-9))  # no points inside
    narrow = fit_loglog_slope(pts, window=(2.6e-4, 2.2e-4))
    assert not narrow.reliable
    assert narrow.points_used < 30


def test_scale_invariance_of_slope():
    x = np.arange(2.0, 1001.0)
    base = fit_loglog_slope(_grid_points(x, x**-2.0), window=(1.0, 1e-9))
    for c in (0.1, 7.0):
        scaled = fit_loglog_slope(_grid_points(c * x, x**-2.0), window=(1.0, 1e-9))
        assert abs(scaled.slope - base.slope) < 1e-9


def test_window_robustness_on_exact_curve():
    x = np.geomspace(2.0, 1e6, 400)
    pts = _grid_points(x, x**-1.5)
    slopes = [
        fit_loglog_slope(pts, window=w).slope
        for w in ((1.0, 1e-9), (1e-2, 1e-6), (1e-4, 1e-8))
    ]
    assert max(slopes) - min(slopes) < 1e-9


def test_hill_on_exact_pareto():
    stream = make_stream(73, 2)
    samples = 1.0 / stream.generator.random(100_000)
    est = hill_estimator(samples, 1000)
    assert est.estimate == pytest.approx(-1.0, abs=0.1)
    assert not est.light_tail
    # Hill is scale free
    est10 = hill_estimator(10.0 * samples, 1000)
    assert est10.estimate == pytest.approx(est.estimate, abs=1e-12)


def test_hill_flags_exponential_as_light():
    stream = make_stream(74, 3)
    samples = ExponentialPackets(1.0).sample_n(stream, 100_000)
    est = hill_estimator(samples, 200)
    assert est.light_tail
    assert est.estimate > -0.2


def test_hill_validates_k():
    with pytest.raises(ConfigError):
        hill_estimator([1.0, 2.0, 3.0], 1)
    with pytest.raises(ConfigError):
        hill_estimator([1.0, 2.0, 3.0], 3)


def test_hill_and_slope_agree_on_pareto():
    stream = make_stream(75, 4)
    samples = 1.0 / stream.generator.random(200_000)
    fit = fit_loglog_slope(empirical_ccdf(samples), window=(1e-1, 1e-3))
    est = hill_estimator(samples, 2000)
    combined = max(fit.stderr, 0.0) + 1.0 / math.sqrt(2000)
    assert abs(fit.slope - est.estimate) < 3.0 * combined + 0.05


@given(
    beta=st.floats(0.5, 3.0),
    c=st.floats(0.1, 10.0),
)
@settings(max_examples=60, deadline=None)
def test_exact_power_law_recovered(beta, c):
    x = np.geomspace(2.0, 1e4, 200)
    fit = fit_loglog_slope(_grid_points(c * x, x**-beta), window=(1.0, 1e-15))
    assert fit.slope == pytest.approx(-beta, abs=1e-7)
