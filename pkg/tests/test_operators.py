#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Tests for the single-step solvers and the fixed-point driver."""

import numpy as np
import pytest

from pctrack.operators import (contraction_rates, default_rho, make_spec,
                               gradient_step, ppa_step, fbs_step, prs_step,
                               anchor_state, readout, run_solver,
                               solver_step, SolverState)
from pctrack.problem import (NonsmoothCost, QuadraticSmooth, SampledProblem,
                             soft_threshold)


def quad_instance(rng, n, mu=0.5, L=4.0, l1=0.3):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    ev = rng.uniform(mu, L, n)
    ev[0], ev[-1] = mu, L
    H = Q @ np.diag(ev) @ Q.T
    smooth = QuadraticSmooth(H, rng.standard_normal(n), rng.standard_normal(n))
    g = NonsmoothCost.l1(n, weight=l1) if l1 > 0 else NonsmoothCost.zero(n)
    return SampledProblem(smooth, g.freeze(0.0), t=0.0, k=0, dim=n)


#%% RATE FORMULAS

def test_contraction_rate_formulas():
    mu, L = 0.5, 4.0
    rho = 2 / (L + mu)
    lam, chi, beta = contraction_rates("gradient", rho, mu, L)
    assert lam == pytest.approx((L - mu) / (L + mu))
    assert (chi, beta) == (1.0, 1.0)
    assert contraction_rates("fbs", rho, mu, L) == (lam, 1.0, 1.0)

    lam, chi, beta = contraction_rates("ppa", 2.0, mu, L)
    assert lam == pytest.approx(1 / (1 + 2 * mu))
    assert (chi, beta) == (1.0, 1.0)

    rho = 1 / np.sqrt(L * mu)
    lam, chi, beta = contraction_rates("prs", rho, mu, L)
    expected = max(abs(1 - rho * L) / (1 + rho * L),
                   abs(1 - rho * mu) / (1 + rho * mu))
    assert lam == pytest.approx(expected)
    assert chi == pytest.approx(1 / (1 + rho * mu))
    assert beta == pytest.approx(1 / (1 + rho * L))


def test_dual_methods_share_primal_rates():
    mu, L = 0.5, 4.0
    rho = 0.3
    assert contraction_rates("dual_ascent", rho, mu, L) == \
        contraction_rates("gradient", rho, mu, L)
    assert contraction_rates("mm", rho, mu, L) == \
        contraction_rates("ppa", rho, mu, L)
    assert contraction_rates("admm", rho, mu, L) == \
        contraction_rates("prs", rho, mu, L)


def test_step_size_rejections():
    with pytest.raises(ValueError):
        contraction_rates("gradient", 0.6, 1.0, 4.0)  # >= 2/L
    with pytest.raises(ValueError):
        contraction_rates("ppa", -1.0, 1.0, 4.0)
    with pytest.raises(ValueError):
        contraction_rates("prs", 0.0, 1.0, 4.0)
    with pytest.raises(ValueError):
        contraction_rates("fbs", 0.1, 4.0, 1.0)  # mu > L
    with pytest.raises(ValueError):
        contraction_rates("nope", 0.1, 1.0, 4.0)


def test_default_step_sizes():
    mu, L = 0.5, 4.0
    assert default_rho("gradient", mu, L) == pytest.approx(2 / (L + mu))
    assert default_rho("fbs", mu, L) == pytest.approx(2 / (L + mu))
    assert default_rho("prs", mu, L) == pytest.approx(1 / np.sqrt(L * mu))
    assert default_rho("ppa", mu, L) == 1.0


#%% SINGLE STEPS

def test_gradient_step_formula():
    rng = np.random.default_rng(0)
    p = quad_instance(rng, 3, l1=0.0)
    x = rng.standard_normal(3)
    assert np.allclose(gradient_step(p, x, 0.2), x - 0.2 * p.smooth.grad(x))


def test_fbs_step_is_prox_of_forward():
    rng = np.random.default_rng(1)
    p = quad_instance(rng, 2, l1=0.3)
    x = rng.standard_normal(2)
    fwd = x - 0.2 * p.smooth.grad(x)
    assert np.allclose(fbs_step(p, x, 0.2), soft_threshold(fwd, 0.2 * 0.3))


def test_ppa_step_is_prox():
    rng = np.random.default_rng(2)
    p = quad_instance(rng, 2, l1=0.0)
    x = rng.standard_normal(2)
    assert np.allclose(ppa_step(p, x, 1.5), p.smooth.prox(1.5, x))


def test_prs_step_reflection_identity():
    # z+ = z + 2(y - x) with x = prox_f(z), y = prox_g(2x - z)
    rng = np.random.default_rng(3)
    p = quad_instance(rng, 2, l1=0.4)
    z = rng.standard_normal(2)
    st = prs_step(p, SolverState(z=z, x=z.copy()), 0.7)
    x = p.smooth.prox(0.7, z)
    y = p.nonsmooth.prox(0.7, 2 * x - z)
    assert np.allclose(st.z, z + 2 * (y - x))
    assert np.allclose(st.x, x)


#%% STATE HANDLING AND DRIVER

def test_prs_anchor_roundtrip():
    # the anchored auxiliary iterate must read out to the same primal point
    rng = np.random.default_rng(4)
    p = quad_instance(rng, 3, l1=0.2)
    spec = make_spec("prs", 0.8, 0.5, 4.0)
    x = rng.standard_normal(3)
    st = anchor_state(p, spec, x)
    assert np.linalg.norm(readout(p, spec, st) - x) <= 1e-8


def test_zero_steps_pass_through():
    rng = np.random.default_rng(5)
    p = quad_instance(rng, 2)
    spec = make_spec("fbs", default_rho("fbs", 0.5, 4.0), 0.5, 4.0)
    st = anchor_state(p, spec, np.array([1.0, -2.0]))
    out = run_solver(p, spec, st, 0)
    assert out is st
    with pytest.raises(ValueError):
        run_solver(p, spec, st, -1)


def test_fbs_converges_to_composite_minimizer():
    rng = np.random.default_rng(6)
    p = quad_instance(rng, 3, l1=0.3)
    spec = make_spec("fbs", default_rho("fbs", 0.5, 4.0), 0.5, 4.0)
    st = anchor_state(p, spec, np.zeros(3))
    st = run_solver(p, spec, st, 3000)
    assert p.optimality_residual(st.x, rho=spec.rho) <= 1e-10


def test_all_solvers_agree_on_fixed_point():
    # on a composite instance, fbs and prs share the minimizer of f + g;
    # gradient and ppa (which ignore g) share the minimizer of f
    rng = np.random.default_rng(7)
    p = quad_instance(rng, 2, l1=0.25)
    mu, L = 0.5, 4.0
    points = {}
    for method in ("gradient", "ppa", "fbs", "prs"):
        spec = make_spec(method, default_rho(method, mu, L), mu, L)
        st = anchor_state(p, spec, np.zeros(2))
        st = run_solver(p, spec, st, 4000)
        points[method] = readout(p, spec, st)
    assert np.linalg.norm(points["fbs"] - points["prs"]) <= 1e-9
    assert np.linalg.norm(points["gradient"] - points["ppa"]) <= 1e-9
    assert np.linalg.norm(points["gradient"] - p.smooth.minimizer()) <= 1e-9


def test_solver_step_increments_counter():
    rng = np.random.default_rng(8)
    p = quad_instance(rng, 2)
    spec = make_spec("fbs", default_rho("fbs", 0.5, 4.0), 0.5, 4.0)
    st = anchor_state(p, spec, np.zeros(2))
    st = solver_step(p, spec, st)
    assert st.iterations == 1
