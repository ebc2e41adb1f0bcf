#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Prediction-correction loop over a sampled horizon, with trace recording.

At each sampling instant the loop builds a surrogate of the next problem
from history, runs the prediction solver warm-started at the current
iterate, then observes the revealed problem and runs the correction solver
from the predicted point. An oracle trajectory of true optimizers supplies
the tracking errors.
"""

import time

import numpy as np
from numpy import linalg as la
from dataclasses import dataclass, field

from . import operators, bounds
from .operators import SolverSpec, make_spec, default_rho
from .prediction import PredictionStrategy, prediction_error_bound
from .problem import SampledProblem


@dataclass
class RunConfig:
    """Configuration of a single prediction-correction run."""

    n_pred: int
    n_corr: int
    strategy: str
    correction: SolverSpec
    prediction: SolverSpec = None
    horizon: int = 1000
    x0: np.ndarray = None
    oracle_tol: float = 1e-12

    def __post_init__(self):
        if self.n_pred < 0 or self.n_corr < 0:
            raise ValueError("solver step counts must be non-negative")
        if self.prediction is None:
            self.prediction = self.correction


@dataclass
class RunTrace:
    """Per-step record of a run; arrays all have length horizon + 1."""

    t: np.ndarray
    x: np.ndarray           # corrected iterates, x[k] at t_k
    x_pred: np.ndarray      # predictions x_hat[k] of the instant t_k
    x_opt: np.ndarray       # oracle optimizers
    err: np.ndarray         # ||x[k] - x_opt[k]||
    pred_err: np.ndarray    # ||x_pred[k] - x_opt[k]||
    bound: np.ndarray       # one-step recursion bound on err[k]
    step_ms: np.ndarray     # wall-clock of step k-1 -> k, milliseconds
    provenance: list = field(default_factory=list)

    def __len__(self):
        return self.t.size

    def asymptotic_errors(self):
        """Errors over the last four fifths of the horizon."""
        start = len(self) - int(np.ceil(4 * len(self) / 5))
        return self.err[start:]


def default_config(constants, strategy="taylor", method="fbs", n_pred=5,
                   n_corr=5, horizon=1000, rho=None, pred_method=None,
                   pred_rho=None):
    """Build a RunConfig with Table-derived rates and default step-sizes."""
    rho = default_rho(method, constants.mu, constants.L) if rho is None else rho
    corr = make_spec(method, rho, constants.mu, constants.L)
    pred = None
    if pred_method is not None:
        pr = (default_rho(pred_method, constants.mu, constants.L)
              if pred_rho is None else pred_rho)
        pred = make_spec(pred_method, pr, constants.mu, constants.L)
    return RunConfig(n_pred, n_corr, strategy, corr, prediction=pred,
                     horizon=horizon)


#%% ORACLE TRAJECTORY

def solve_sampled(problem, x0, tol=1e-12, max_iter=10 ** 6):
    """
    Minimizer of a frozen composite problem by proximal gradient iteration,
    to successive-iterate distance `tol`.
    """
    sc = problem.smooth
    ev = la.eigvalsh(sc.hessian(np.asarray(x0, float)))
    mu_loc, L_loc = max(ev[0], 1e-12), max(ev[-1], 1e-12)
    rho = 2 / (L_loc + mu_loc)
    x = np.asarray(x0, dtype=float)
    for _ in range(max_iter):
        x_new = problem.nonsmooth.prox(rho, x - rho * sc.grad(x))
        if la.norm(x_new - x) <= tol:
            return x_new
        x = x_new
    raise RuntimeError(f"oracle solve did not converge to {tol:g}")


def optimal_trajectory(problem, horizon, tol=1e-12, x0=None):
    """Oracle optimizers x*_k for k = 0..horizon, each warm-started from
    the previous one."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    x = np.zeros(problem.dim) if x0 is None else np.asarray(x0, float)
    out = np.empty((horizon + 1, problem.dim))
    for k in range(horizon + 1):
        x = solve_sampled(problem.sample(k), x, tol=tol)
        out[k] = x
    return out


#%% MAIN LOOP

def run_prediction_correction(problem, config, x_opt=None):
    """
    Execute the prediction-correction template over the configured horizon.

    Zero prediction steps pass the warm start through (x_hat = x_k); zero
    correction steps accept the prediction unchanged. `x_opt` may carry a
    precomputed oracle trajectory to share across method sweeps.
    """
    K = config.horizon
    strategy = PredictionStrategy(config.strategy)
    if x_opt is None:
        x_opt = optimal_trajectory(problem, K, tol=config.oracle_tol)
    x0 = np.zeros(problem.dim) if config.x0 is None else np.asarray(config.x0, float)

    n = problem.dim
    xs = np.empty((K + 1, n))
    preds = np.empty((K + 1, n))
    errs = np.empty(K + 1)
    pred_errs = np.empty(K + 1)
    step_ms = np.zeros(K + 1)
    provenance = ["init"]

    x = x0.copy()
    xs[0], preds[0] = x, x
    errs[0] = la.norm(x - x_opt[0])
    pred_errs[0] = errs[0]

    same_solver = (config.prediction.method == config.correction.method
                   and config.prediction.rho == config.correction.rho)

    for k in range(K):
        tic = time.perf_counter()
        # prediction phase: surrogate of t_{k+1} from information up to t_k
        if config.n_pred > 0:
            surrogate = strategy.build(problem, k, x)
            provenance.append(surrogate.provenance)
            st = operators.anchor_state(surrogate, config.prediction, x)
            st = operators.run_solver(surrogate, config.prediction, st,
                                      config.n_pred)
            x_hat = operators.readout(surrogate, config.prediction, st)
        else:
            provenance.append("none")
            x_hat = x.copy()
        # correction phase: the revealed problem at t_{k+1}
        sk1 = problem.sample(k + 1)
        if config.n_corr > 0:
            if (config.n_pred > 0 and same_solver
                    and config.correction.method == "prs"):
                # same PRS solver in both phases: keep the auxiliary iterate
                st = operators.SolverState(z=st.z, x=x_hat)
            else:
                st = operators.anchor_state(sk1, config.correction, x_hat)
            st = operators.run_solver(sk1, config.correction, st, config.n_corr)
            x = operators.readout(sk1, config.correction, st)
        else:
            x = x_hat
        step_ms[k + 1] = (time.perf_counter() - tic) * 1e3
        xs[k + 1], preds[k + 1] = x, x_hat
        errs[k + 1] = la.norm(x - x_opt[k + 1])
        pred_errs[k + 1] = la.norm(x_hat - x_opt[k + 1])

    t = np.arange(K + 1) * problem.ts
    bound = recursion_bound_curve(problem, config, errs, provenance)
    return RunTrace(t, xs, preds, x_opt, errs, pred_errs, bound, step_ms,
                    provenance)


#%% RECURSION-BOUND CHECKING

def _step_tau(problem, config, prov, err_k):
    """Prediction-error bound matching the provenance actually used."""
    c = problem.constants
    if prov == "none":
        # no prediction phase: x_hat = x_k, off from x*_{k+1} by at most
        # the optimizer drift plus the current error
        return (c.C0 * problem.ts + c.D0) / c.mu
    name = {"one_step_back": "osb", "taylor": "taylor",
            "taylor_fd": "taylor_fd", "extrapolation": "extrapolation"}[prov]
    return prediction_error_bound(name, c, problem.ts, current_error=err_k)


def recursion_bound_curve(problem, config, errs, provenance):
    """One-step recursion bound evaluated along a realized error sequence."""
    c = problem.constants
    rc = bounds.as_triple(config.correction)
    rp = bounds.as_triple(config.prediction)
    zc = bounds.zeta(config.n_corr, rc)
    zp = bounds.zeta(config.n_pred, rp)
    xp = bounds.xi(config.n_pred, rp)
    sigma = (c.C0 * problem.ts + c.D0) / c.mu
    out = np.empty_like(errs)
    out[0] = errs[0]
    for k in range(errs.size - 1):
        if config.n_pred > 0:
            tau = _step_tau(problem, config, provenance[k + 1], errs[k])
            out[k + 1] = zc * (zp * errs[k] + zp * sigma + xp * tau)
        else:
            out[k + 1] = zc * (errs[k] + sigma)
    return out


@dataclass
class RecursionReport:
    """Outcome of checking a trace against the one-step recursion bound."""

    violations: list
    margin: float

    @property
    def ok(self):
        return not self.violations


def check_recursion_bound(trace, problem, config, tol=1e-9):
    """
    Verify err[k+1] <= zeta_C (zeta_P err[k] + zeta_P sigma + xi_P tau_k)
    at every step of a completed trace.
    """
    bound = recursion_bound_curve(problem, config, trace.err, trace.provenance)
    violations = []
    margin = np.inf
    for k in range(1, len(trace)):
        slack = bound[k] + tol - trace.err[k]
        margin = min(margin, slack)
        if slack < 0:
            violations.append((k, float(trace.err[k]), float(bound[k])))
    return RecursionReport(violations, float(margin))
