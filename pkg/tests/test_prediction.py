#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Tests for the prediction strategies and their error bounds."""

import numpy as np
import pytest

from pctrack.prediction import (PredictionStrategy, taylor_surrogate,
                                extrapolation_surrogate,
                                interpolation_coefficients,
                                prediction_error_bound,
                                taylor_bound_coefficients)
from pctrack.presets import tracking_l1_logistic, quadratic_sine_drift
from pctrack.problem import RegularityConstants


#%% SURROGATE CONSTRUCTION

def test_taylor_surrogate_gradient_at_anchor():
    # at the anchor the surrogate gradient is grad f + Ts * dt_grad f
    prob = tracking_l1_logistic(ts=0.1)
    x0 = np.array([0.0])
    sur = taylor_surrogate(prob, x0, 0.0, 0.1)
    expected = prob.smooth.grad(x0, 0.0) + 0.1 * prob.smooth.dt_grad(x0, 0.0)
    assert np.allclose(sur.smooth.grad(x0), expected)
    # surrogate Hessian is the sampled Hessian, constant in x
    assert np.allclose(sur.smooth.hessian(x0), prob.smooth.hessian(x0, 0.0))
    assert np.allclose(sur.smooth.hessian(x0 + 1.0),
                       prob.smooth.hessian(x0, 0.0))


def test_taylor_fd_matches_exact_on_linear_drift():
    # the drift of f = x^2/2 - sin(t) x is smooth; fd and exact surrogates
    # differ only by the finite-difference error of the time derivative
    prob = quadratic_sine_drift(ts=0.1)
    x0, k = np.array([0.2]), 5
    t_k = prob.time_of(k)
    exact = taylor_surrogate(prob, x0, t_k, prob.ts, "exact")
    fd = taylor_surrogate(prob, x0, t_k, prob.ts, "fd",
                          f_km1=prob.smooth.freeze(prob.time_of(k - 1)))
    diff = abs(exact.smooth.grad(x0)[0] - fd.smooth.grad(x0)[0])
    assert diff <= prob.ts ** 2  # one-sided difference error C3 Ts^2 / 2
    with pytest.raises(ValueError):
        taylor_surrogate(prob, x0, t_k, prob.ts, "fd")
    with pytest.raises(ValueError):
        taylor_surrogate(prob, x0, t_k, prob.ts, "nope")


def test_extrapolation_surrogate_combination():
    prob = quadratic_sine_drift(ts=0.1)
    f1, f0 = prob.sample(6).smooth, prob.sample(5).smooth
    g = prob.nonsmooth.freeze(0.6)
    sur = extrapolation_surrogate(f1, f0, g, np.array([0.0]), 0.6)
    x = np.array([0.7])
    assert sur.smooth.value(x) == pytest.approx(2 * f1.value(x) - f0.value(x))
    assert np.allclose(sur.smooth.grad(x), 2 * f1.grad(x) - f0.grad(x))
    with pytest.raises(ValueError):
        extrapolation_surrogate(f1, f0, g, np.array([0.0]), 0.6, c2=0.5)


def test_extrapolation_predicts_linear_drift_exactly():
    # a target moving linearly in t is extrapolated with zero error
    from pctrack.problem import SmoothCost, NonsmoothCost, TimeVaryingProblem
    smooth = SmoothCost(1, value=lambda x, t: 0.5 * (x[0] - t) ** 2,
                        grad=lambda x, t: np.array([x[0] - t]),
                        hessian=lambda x, t: np.array([[1.0]]))
    prob = TimeVaryingProblem(smooth, NonsmoothCost.zero(1),
                              RegularityConstants(mu=1, L=1, C0=1), 0.1)
    f1, f0 = prob.sample(4).smooth, prob.sample(3).smooth
    sur = extrapolation_surrogate(f1, f0, prob.nonsmooth.freeze(0.4),
                                  np.array([0.0]), 0.4)
    # minimizer of the surrogate equals the true optimum at t_5 = 0.5
    assert sur.smooth.grad(np.array([0.5]))[0] == pytest.approx(0.0)


def test_interpolation_coefficients():
    assert interpolation_coefficients(1) == [1.0]
    assert interpolation_coefficients(2) == [2.0, -1.0]
    assert np.allclose(interpolation_coefficients(3), [3.0, -3.0, 1.0])
    # weights always sum to one (they reproduce constants exactly)
    for I in range(1, 6):
        assert np.isclose(sum(interpolation_coefficients(I)), 1.0)
    with pytest.raises(ValueError):
        interpolation_coefficients(0)


#%% STRATEGY DRIVER

def test_strategy_names_and_fallback():
    with pytest.raises(ValueError):
        PredictionStrategy("bogus")
    prob = quadratic_sine_drift(ts=0.1)
    x = np.array([0.1])
    # two-sample strategies fall back to one-step-back with no history
    for name in ("extrapolation", "taylor_fd"):
        sur = PredictionStrategy(name).build(prob, 0, x)
        assert sur.provenance == "one_step_back"
        sur = PredictionStrategy(name).build(prob, 3, x)
        assert sur.provenance == name
    assert PredictionStrategy("osb").build(prob, 0, x).provenance == \
        "one_step_back"
    assert PredictionStrategy("taylor").build(prob, 0, x).provenance == \
        "taylor"


#%% ERROR BOUNDS

def test_bound_formulas():
    c = RegularityConstants(mu=2.0, L=5.0, C0=0.3, C1=0.1, C2=0.0, C3=0.7,
                            D0=0.05)
    ts = 0.2
    osb = (c.C0 * ts + c.D0) / c.mu
    assert prediction_error_bound("osb", c, ts) == pytest.approx(osb)
    assert prediction_error_bound("extrapolation", c, ts) == pytest.approx(
        (c.C3 * ts ** 2 + c.D0) / c.mu)

    e = 0.01
    C4, C5, C6 = taylor_bound_coefficients(c, ts)
    linear = 2 * (c.L / c.mu) * e + 2 * osb * (1 + c.L / c.mu)
    quadratic = c.C1 / (2 * c.mu) * e ** 2 + C4 * e + C5 * ts ** 2 / 2 + C6 * c.D0
    assert prediction_error_bound("taylor", c, ts, e) == pytest.approx(
        min(linear, quadratic))
    with pytest.raises(ValueError):
        prediction_error_bound("bogus", c, ts)


def test_taylor_coefficient_formulas():
    c = RegularityConstants(mu=2.0, L=5.0, C0=0.3, C1=0.1, C2=0.4, C3=0.7,
                            D0=0.05)
    ts = 0.2
    C4, C5, C6 = taylor_bound_coefficients(c, ts)
    assert C4 == pytest.approx(ts * (c.C0 * c.C1 / c.mu ** 2 + c.C2 / c.mu)
                               + c.C1 * c.D0 / c.mu ** 2)
    assert C5 == pytest.approx(c.C0 ** 2 * c.C1 / c.mu ** 3
                               + 2 * c.C0 * c.C2 / c.mu ** 2 + c.C3 / c.mu)
    assert C6 == pytest.approx(ts * (c.C0 * c.C1 / c.mu + c.C2) / c.mu ** 2
                               + (1 + c.C1 * c.D0 / (2 * c.mu ** 2)) / c.mu)
    # the finite-difference variant pays an extra C3/mu in C5
    _, C5fd, _ = taylor_bound_coefficients(c, ts, fd=True)
    assert C5fd == pytest.approx(C5 + c.C3 / c.mu)
