#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Tests for problem containers, oracles and the inner Newton solver."""

import numpy as np
import pytest

from pctrack.problem import (SmoothCost, NonsmoothCost, RegularityConstants,
                             TimeVaryingProblem, QuadraticSmooth,
                             newton_argmin, soft_threshold,
                             finite_diff_dt_grad, validate_constants)


def random_spd(rng, n, mu=0.5, L=4.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    ev = rng.uniform(mu, L, n)
    ev[0], ev[-1] = mu, L
    return Q @ np.diag(ev) @ Q.T


#%% INNER NEWTON

def test_newton_argmin_matches_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = rng.integers(1, 6)
        H = random_spd(rng, n)
        b = rng.standard_normal(n)
        x = newton_argmin(
            lambda y: 0.5 * y @ H @ y - b @ y,
            lambda y: H @ y - b,
            lambda y: H,
            rng.standard_normal(n),
        )
        assert np.linalg.norm(x - np.linalg.solve(H, b)) <= 1e-8


def test_newton_argmin_nonquadratic():
    # scalar logistic-type cost with a known stationarity condition
    x = newton_argmin(
        lambda y: 0.5 * y[0] ** 2 + np.logaddexp(0.0, y[0]),
        lambda y: np.array([y[0] + 1 / (1 + np.exp(-y[0]))]),
        lambda y: np.array([[1 + 0.25 / np.cosh(y[0] / 2) ** 2]]),
        np.array([3.0]),
    )
    g = x[0] + 1 / (1 + np.exp(-x[0]))
    assert abs(g) <= 1e-10


#%% SMOOTH COSTS

def test_smooth_finite_difference_fallbacks():
    # omit hessian and dt_grad; fallbacks must agree with the analytic cost
    f = SmoothCost(
        2,
        value=lambda x, t: 0.5 * float(x @ x) - np.sin(t) * x[0],
        grad=lambda x, t: x - np.array([np.sin(t), 0.0]),
    )
    x, t = np.array([0.3, -1.2]), 2.0
    assert np.allclose(f.hessian(x, t), np.eye(2), atol=1e-5)
    assert np.allclose(f.dt_grad(x, t), [-np.cos(t), 0.0], atol=1e-5)
    assert np.allclose(f.dtt_grad(x, t), [np.sin(t), 0.0], atol=1e-3)


def test_freeze_fixes_time():
    f = SmoothCost(1, value=lambda x, t: t * x[0] ** 2,
                   grad=lambda x, t: np.array([2 * t * x[0]]))
    frozen = f.freeze(3.0)
    assert frozen.value(np.array([2.0])) == pytest.approx(12.0)
    assert frozen.grad(np.array([2.0]))[0] == pytest.approx(12.0)


def test_quadratic_prox_matches_newton_prox():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = rng.integers(1, 5)
        H = random_spd(rng, n)
        q = QuadraticSmooth(H, rng.standard_normal(n), rng.standard_normal(n))
        v = rng.standard_normal(n)
        rho = rng.uniform(0.1, 2.0)
        # generic Newton prox of the same frozen cost
        generic = newton_argmin(
            lambda y: q.value(y) + np.linalg.norm(y - v) ** 2 / (2 * rho),
            lambda y: q.grad(y) + (y - v) / rho,
            lambda y: q.hessian(y) + np.eye(n) / rho,
            v,
        )
        assert np.linalg.norm(q.prox(rho, v) - generic) <= 1e-8


def test_quadratic_minimizer():
    H = np.array([[2.0, 0.0], [0.0, 4.0]])
    q = QuadraticSmooth(H, np.array([2.0, -4.0]), np.zeros(2))
    assert np.allclose(q.minimizer(), [-1.0, 1.0])
    assert np.allclose(q.grad(q.minimizer()), 0.0)


#%% NON-SMOOTH COSTS

def test_soft_threshold_values():
    v = np.array([3.0, -0.5, 0.2, -2.0])
    assert np.allclose(soft_threshold(v, 1.0), [2.0, 0.0, 0.0, -1.0])


def test_l1_prox_is_brute_force_argmin():
    rng = np.random.default_rng(2)
    g = NonsmoothCost.l1(1, weight=0.7)
    grid = np.arange(-4, 4, 1e-4)
    for _ in range(5):
        v, rho = rng.uniform(-3, 3), rng.uniform(0.2, 2.0)
        obj = 0.7 * np.abs(grid) + (grid - v) ** 2 / (2 * rho)
        best = grid[np.argmin(obj)]
        assert abs(g.prox(rho, np.array([v]), 0.0)[0] - best) <= 2e-4


def test_time_varying_l1_weight():
    g = NonsmoothCost.l1(1, weight_fn=lambda t: 1.0 + t)
    assert g.time_varying
    assert g.value(np.array([2.0]), 0.0) == pytest.approx(2.0)
    assert g.value(np.array([2.0]), 1.0) == pytest.approx(4.0)


def test_box_and_halfspace_projections():
    box = NonsmoothCost.box([-1.0, 0.0], [1.0, 2.0])
    assert np.allclose(box.prox(1.0, np.array([5.0, -3.0]), 0.0), [1.0, 0.0])
    assert box.value(np.array([0.5, 1.0]), 0.0) == 0.0
    assert box.value(np.array([2.0, 1.0]), 0.0) == np.inf

    hs = NonsmoothCost.halfspace(np.array([1.0, 1.0]), 1.0)
    p = hs.prox(1.0, np.array([2.0, 2.0]), 0.0)
    assert np.allclose(p, [0.5, 0.5])  # nearest point on <a,x> = 1
    inside = np.array([0.2, 0.3])
    assert np.allclose(hs.prox(1.0, inside, 0.0), inside)


#%% CONTAINERS AND VALIDATION

def test_constants_validation():
    with pytest.raises(ValueError):
        RegularityConstants(mu=0.0, L=1.0)
    with pytest.raises(ValueError):
        RegularityConstants(mu=2.0, L=1.0)
    with pytest.raises(ValueError):
        RegularityConstants(mu=1.0, L=1.0, C0=-0.1)
    c = RegularityConstants(mu=0.5, L=2.0)
    assert c.kappa == pytest.approx(4.0)


def quadratic_problem(ts=0.1):
    smooth = SmoothCost(
        1,
        value=lambda x, t: 0.5 * x[0] ** 2 - np.sin(t) * x[0],
        grad=lambda x, t: np.array([x[0] - np.sin(t)]),
        hessian=lambda x, t: np.array([[1.0]]),
        dt_grad=lambda x, t: np.array([-np.cos(t)]),
    )
    constants = RegularityConstants(mu=1.0, L=1.0, C0=1.0, C3=1.0)
    return TimeVaryingProblem(smooth, NonsmoothCost.l1(1, weight=0.5),
                              constants, ts)


def test_problem_invariants():
    with pytest.raises(ValueError):
        quadratic_problem(ts=1.5)
    p = quadratic_problem()
    assert p.time_of(7) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        p.sample(-1)
    sk = p.sample(3)
    assert sk.t == pytest.approx(0.3)
    assert sk.smooth.grad(np.array([0.0]))[0] == pytest.approx(-np.sin(0.3))


def test_optimality_residual_zero_at_optimum():
    p = quadratic_problem()
    sk = p.sample(10)
    x_star = soft_threshold(np.array([np.sin(1.0)]), 0.5)
    assert sk.optimality_residual(x_star) <= 1e-12
    assert sk.optimality_residual(x_star + 0.1) > 1e-3


def test_finite_diff_dt_grad():
    p = quadratic_problem()
    f1, f0 = p.sample(1).smooth, p.sample(0).smooth
    fd = finite_diff_dt_grad(f1, f0, np.array([0.4]), p.ts)
    exact = -(np.sin(0.1) - np.sin(0.0)) / 0.1
    assert fd[0] == pytest.approx(exact)
    with pytest.raises(ValueError):
        finite_diff_dt_grad(f1, f0, np.array([0.4]), 0.0)


def test_validate_constants_passes_and_flags():
    rng = np.random.default_rng(3)
    p = quadratic_problem()
    grid = [(rng.uniform(-2, 2, 1), rng.uniform(0, 10)) for _ in range(10)]
    report = validate_constants(p, grid, rng=rng)
    assert report.ok

    # falsified C0 must be flagged, never raised
    bad = TimeVaryingProblem(p.smooth, p.nonsmooth,
                             RegularityConstants(mu=1.0, L=1.0, C0=1e-3,
                                                 C3=1.0), p.ts)
    report = validate_constants(bad, grid, rng=rng)
    assert not report.ok
    assert any("C0" in v for v in report.violations)
    with pytest.raises(ValueError):
        validate_constants(p, [])
