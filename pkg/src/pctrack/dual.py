#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Dual decomposition of linearly constrained time-varying problems.

The constrained problem min f(x;t) + h(y;t) s.t. Ax + By = c is attacked
through its Fenchel dual in the multiplier w: d^f(w;t) = f*(A'w;t) - <w,c>
plus d^h(w) = h*(B'w). With f strongly convex and smooth and A full row
rank, d^f inherits strong convexity and smoothness with moduli derived
from the spectrum of AA', so the primal solver catalogue applies verbatim
on the dual: gradient becomes dual ascent, the proximal point algorithm
becomes the method of multipliers, forward-backward becomes dual FBS and
Peaceman-Rachford becomes ADMM.

All inner argmin subproblems are smooth and strongly convex and solved by
the same safeguarded Newton as the primal prox oracles, warm-started from
the previous inner solution.
"""

import numpy as np
from numpy import linalg as la
from dataclasses import dataclass

from .problem import (RegularityConstants, SmoothCost, NonsmoothCost,
                      QuadraticSmooth, newton_argmin)


#%% PROBLEM CONTAINERS

@dataclass
class ConstrainedProblem:
    """
    Time-varying problem min f(x;t) + h(y;t) subject to Ax + By = c.

    `h` may be None together with B = 0, leaving an equality-constrained
    smooth problem. `constants` describe f; `d0_bar` bounds the drift of
    the conjugate of h along the dual optimal trajectory.
    """

    f: SmoothCost
    A: np.ndarray
    c: np.ndarray
    constants: RegularityConstants
    ts: float
    h: NonsmoothCost = None
    B: np.ndarray = None
    d0_bar: float = 0.0

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        p, n = self.A.shape
        if n != self.f.dim:
            raise ValueError("A column count must match the dimension of f")
        self.c = np.asarray(self.c, dtype=float).reshape(p)
        if self.B is None:
            self.B = np.zeros((p, 0))
        self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        if self.B.shape[0] != p:
            raise ValueError("A and B must have the same row count")
        if self.h is None and self.B.shape[1] > 0:
            raise ValueError("B given without h")
        if self.h is not None and self.h.dim != self.B.shape[1]:
            raise ValueError("B column count must match the dimension of h")
        if not (0 < self.ts < 1):
            raise ValueError("sampling period Ts must lie in (0, 1)")
        sv = la.svd(self.A, compute_uv=False)
        if sv[-1] <= 1e-10:
            raise ValueError("A must have full row rank")
        # c must be reachable by the constraint map
        AB = np.hstack([self.A, self.B])
        resid = la.norm(AB @ la.lstsq(AB, self.c, rcond=None)[0] - self.c)
        if resid > 1e-8 * max(1.0, la.norm(self.c)):
            raise ValueError("c is not in the range of [A B]")

    @property
    def p(self):
        return self.A.shape[0]

    def time_of(self, k):
        return k * self.ts

    def sample(self, k):
        if k < 0:
            raise ValueError("sample index must be non-negative")
        t = self.time_of(k)
        h = self.h.freeze(t) if self.h is not None else None
        return FrozenConstrained(self.f.freeze(t), self.A, self.B, self.c, h)


class FrozenConstrained:
    """Constrained problem frozen at a fixed time, with inner argmin oracles."""

    def __init__(self, f, A, B, c, h=None):
        self.f, self.h = f, h
        self.A, self.B, self.c = A, B, c
        self._warm = np.zeros(f.dim)
        s2 = None
        if B.shape[1] > 0:
            BtB = B.T @ B
            s2 = BtB[0, 0]
            if not np.allclose(BtB, s2 * np.eye(B.shape[1]), atol=1e-12):
                raise NotImplementedError(
                    "y update needs B'B proportional to the identity")
        self._btb_scale = s2

    def x_argmin(self, w, rho=0.0):
        """
        argmin of f(x) - <A'w, x> (+ rho/2 ||Ax - c||^2 when rho > 0),
        warm-started from the previous solve.
        """
        A, c = self.A, self.c
        Atw = A.T @ w

        def val(x):
            v = self.f.value(x) - float(Atw @ x)
            if rho > 0:
                v += 0.5 * rho * la.norm(A @ x - c) ** 2
            return v

        def grad(x):
            g = self.f.grad(x) - Atw
            if rho > 0:
                g = g + rho * A.T @ (A @ x - c)
            return g

        def hess(x):
            H = self.f.hessian(x)
            if rho > 0:
                H = H + rho * A.T @ A
            return H

        x = newton_argmin(val, grad, hess, self._warm)
        self._warm = x
        return x

    def y_argmin(self, v, rho):
        """argmin of h(y) - <B'v, y> + rho/2 ||By||^2 (closed form)."""
        if self.B.shape[1] == 0:
            return np.zeros(0)
        s2 = self._btb_scale
        return self.h.prox(1 / (rho * s2), (self.B.T @ v) / (rho * s2))

    def dual_grad(self, w):
        """Gradient A x_bar(w) - c of the smooth dual component."""
        x = self.x_argmin(w)
        g = self.A @ x - self.c
        return g, x


#%% DUAL FUNCTION ORACLES

@dataclass
class DualProblem:
    """Dual oracles and constants derived from a ConstrainedProblem."""

    cp: ConstrainedProblem
    mu_bar: float
    L_bar: float
    C0_bar: float
    D0_bar: float

    @property
    def kappa_bar(self):
        return self.L_bar / self.mu_bar

    @property
    def dual_constants(self):
        return RegularityConstants(self.mu_bar, self.L_bar, C0=self.C0_bar,
                                   D0=self.D0_bar)

    def x_bar(self, w, t, x0=None):
        """Inner minimizer argmin f(x;t) - <A'w, x>."""
        f = self.cp.f
        Atw = self.cp.A.T @ np.asarray(w, float)
        x0 = np.zeros(f.dim) if x0 is None else x0
        return newton_argmin(
            lambda x: f.value(x, t) - float(Atw @ x),
            lambda x: f.grad(x, t) - Atw,
            lambda x: f.hessian(x, t),
            x0,
        )

    def value(self, w, t):
        """d^f(w;t) = f*(A'w;t) - <w, c>."""
        w = np.asarray(w, float)
        x = self.x_bar(w, t)
        return (float((self.cp.A.T @ w) @ x) - self.cp.f.value(x, t)
                - float(w @ self.cp.c))

    def derivatives(self, w, t):
        """
        Gradient, Hessian and time derivative of the gradient of d^f.

        grad = A x_bar - c, hess = A H^{-1} A', dt_grad = -A H^{-1} dtx f,
        all evaluated at the inner minimizer x_bar(w, t).
        """
        w = np.asarray(w, float)
        x = self.x_bar(w, t)
        H = self.cp.f.hessian(x, t)
        Hinv_At = la.solve(H, self.cp.A.T)
        grad = self.cp.A @ x - self.cp.c
        hess = self.cp.A @ Hinv_At
        dt_grad = -Hinv_At.T @ self.cp.f.dt_grad(x, t)
        return grad, hess, dt_grad


def build_dual(cp):
    """Derive the dual oracles and dual regularity constants."""
    ev = la.eigvalsh(cp.A @ cp.A.T)
    c = cp.constants
    mu_bar = ev[0] / c.L
    L_bar = ev[-1] / c.mu
    C0_bar = la.norm(cp.A, 2) * c.C0 / c.mu
    return DualProblem(cp, mu_bar, L_bar, C0_bar, cp.d0_bar)


def dual_derivatives(dp, w, t):
    return dp.derivatives(w, t)


#%% DUAL SOLVER STEPS

@dataclass
class DualState:
    """Dual iterate w with the ADMM auxiliary iterate z and primal readouts."""

    w: np.ndarray
    z: np.ndarray = None
    x: np.ndarray = None
    y: np.ndarray = None


def dual_ascent_step(fc, w, rho):
    """x-argmin of the Lagrangian, then a gradient step on the multiplier."""
    g, x = fc.dual_grad(w)
    if fc.B.shape[1] > 0:
        raise ValueError("dual ascent handles smooth-only problems (B = 0)")
    w_new = w - rho * g
    return DualState(w=w_new, x=x, y=np.zeros(0))


def mm_step(fc, w, rho):
    """Augmented-Lagrangian x-argmin, then the multiplier update."""
    if fc.B.shape[1] > 0:
        raise ValueError("the method of multipliers handles B = 0 only")
    x = fc.x_argmin(w, rho=rho)
    w_new = w - rho * (fc.A @ x - fc.c)
    return DualState(w=w_new, x=x, y=np.zeros(0))


def dual_fbs_step(fc, w, rho):
    """Forward step on d^f, backward (prox) step on d^h."""
    g, x = fc.dual_grad(w)
    u = w - rho * g
    y = fc.y_argmin(u, rho)
    w_new = u - rho * (fc.B @ y) if fc.B.shape[1] > 0 else u
    return DualState(w=w_new, x=x, y=y)


def admm_step(fc, state, rho):
    """
    One Peaceman-Rachford step on the dual pair (d^f, d^h): augmented
    x-argmin, multiplier w, y-argmin at the reflected point, then the
    auxiliary update z+ = z + 2(u - w).
    """
    z = np.asarray(state.z, float)
    x = fc.x_argmin(z, rho=rho)
    w = z - rho * (fc.A @ x - fc.c)
    v = 2 * w - z
    y = fc.y_argmin(v, rho)
    u = v - rho * (fc.B @ y) if fc.B.shape[1] > 0 else v
    return DualState(w=w, z=z + 2 * (u - w), x=x, y=y)


def anchor_dual_state(fc, spec, w):
    """State whose ADMM readout prox_{rho d^f}(z) equals `w` exactly."""
    w = np.asarray(w, float)
    if spec.method == "admm":
        g, _ = fc.dual_grad(w)
        return DualState(w=w.copy(), z=w + spec.rho * g)
    return DualState(w=w.copy())


def recover_primal(fc, w, rho):
    """
    Primal pair read off a multiplier: x is the inner Lagrangian minimizer,
    y the prox-style recovery whose fixed point at w* is exactly y*.
    """
    g, x = fc.dual_grad(w)
    y = fc.y_argmin(w - rho * g, rho) if fc.B.shape[1] > 0 else np.zeros(0)
    return x, y


def dual_readout(fc, spec, state):
    """Final (w, x, y) of a state, resolving the ADMM auxiliary iterate."""
    if spec.method == "admm" and state.z is not None:
        x = fc.x_argmin(state.z, rho=spec.rho)
        w = state.z - spec.rho * (fc.A @ x - fc.c)
    else:
        w = np.asarray(state.w, float)
    x, y = recover_primal(fc, w, spec.rho)
    return w, x, y


def dual_solver_step(fc, spec, state):
    if spec.method == "dual_ascent":
        return dual_ascent_step(fc, state.w, spec.rho)
    if spec.method == "mm":
        return mm_step(fc, state.w, spec.rho)
    if spec.method == "dual_fbs":
        return dual_fbs_step(fc, state.w, spec.rho)
    if spec.method == "admm":
        return admm_step(fc, state, spec.rho)
    raise ValueError(f"not a dual method: {spec.method!r}")


def run_dual_solver(fc, spec, init, n_steps):
    if n_steps < 0:
        raise ValueError("step count must be non-negative")
    state = init
    for _ in range(n_steps):
        state = dual_solver_step(fc, spec, state)
    return state


#%% DUAL PREDICTION

def dual_taylor_surrogate(cp, dp, w_k, t_k):
    """
    Surrogate of the next constrained problem built in the primal space:
    quadratic expansion of f around the inner minimizer x_bar(w_k, t_k),
    with the gradient advanced by Ts along its time derivative; h, A, B, c
    carried over unchanged.
    """
    x_bar = dp.x_bar(w_k, t_k)
    f = cp.f
    g0 = f.grad(x_bar, t_k) + cp.ts * f.dt_grad(x_bar, t_k)
    smooth = QuadraticSmooth(f.hessian(x_bar, t_k), g0, x_bar)
    h = cp.h.freeze(t_k) if cp.h is not None else None
    return FrozenConstrained(smooth, cp.A, cp.B, cp.c, h)


#%% DUAL ORACLE AND RUNNER

def solve_dual(fc, w0, mu_bar, L_bar, tol=1e-12, max_iter=10 ** 6):
    """
    Dual optimizer of a frozen constrained problem by dual FBS iteration.

    Iterates until the successive-iterate distance drops below `tol`, or
    until it stops shrinking at the noise floor of the inner argmin oracle;
    the floor is accepted only when it is already below 1e-8.
    """
    rho = 2 / (L_bar + mu_bar)
    state = DualState(w=np.asarray(w0, float))
    best, stalled = np.inf, 0
    for _ in range(max_iter):
        new = dual_fbs_step(fc, state.w, rho)
        delta = la.norm(new.w - state.w)
        if delta <= tol or (stalled >= 50 and delta <= 1e-8):
            x, y = recover_primal(fc, new.w, rho)
            return DualState(w=new.w, x=x, y=y)
        if delta < 0.9 * best:
            best, stalled = delta, 0
        else:
            stalled += 1
        state = new
    raise RuntimeError(f"dual oracle solve did not converge to {tol:g}")


def dual_optimal_trajectory(cp, horizon, tol=1e-12, w0=None):
    """Dual optimizers w*_k (and primal x*_k, y*_k) for k = 0..horizon."""
    dp = build_dual(cp)
    w = np.zeros(cp.p) if w0 is None else np.asarray(w0, float)
    ws = np.empty((horizon + 1, cp.p))
    xs = np.empty((horizon + 1, cp.f.dim))
    ys = np.empty((horizon + 1, cp.B.shape[1]))
    for k in range(horizon + 1):
        st = solve_dual(cp.sample(k), w, dp.mu_bar, dp.L_bar, tol=tol)
        w = st.w
        ws[k], xs[k] = w, st.x
        if cp.B.shape[1] > 0:
            ys[k] = st.y
    return ws, xs, ys


@dataclass
class DualRunTrace:
    """Per-step record of a dual prediction-correction run."""

    t: np.ndarray
    w: np.ndarray
    x: np.ndarray
    y: np.ndarray
    w_opt: np.ndarray
    x_opt: np.ndarray
    dual_err: np.ndarray
    x_err: np.ndarray
    By_err: np.ndarray
    step_ms: np.ndarray

    def __len__(self):
        return self.t.size

    def asymptotic_errors(self):
        start = len(self) - int(np.ceil(4 * len(self) / 5))
        return self.dual_err[start:]


def run_dual_prediction_correction(cp, config, w_opt=None):
    """
    Dual prediction-correction over the horizon: per instant, predict on
    the dual surrogate warm-started at w_k, then correct on the revealed
    dual problem, and read the primal pair off the last dual iterate.
    """
    import time as _time

    K = config.horizon
    dp = build_dual(cp)
    if w_opt is None:
        w_opt, x_opt, y_opt = dual_optimal_trajectory(cp, K,
                                                      tol=config.oracle_tol)
    else:
        w_opt, x_opt, y_opt = w_opt
    w0 = np.zeros(cp.p) if config.x0 is None else np.asarray(config.x0, float)

    ws = np.empty((K + 1, cp.p))
    xs = np.empty((K + 1, cp.f.dim))
    ys = np.empty((K + 1, cp.B.shape[1]))
    dual_err = np.empty(K + 1)
    x_err = np.empty(K + 1)
    By_err = np.empty(K + 1)
    step_ms = np.zeros(K + 1)

    w = w0.copy()
    fc0 = cp.sample(0)
    _, x, y = dual_readout(fc0, config.correction, DualState(w=w))
    ws[0], xs[0] = w, x
    if ys.shape[1] > 0:
        ys[0] = y
    dual_err[0] = la.norm(w - w_opt[0])
    x_err[0] = la.norm(x - x_opt[0])
    By_err[0] = la.norm(cp.B @ y - cp.B @ y_opt[0]) if ys.shape[1] > 0 else 0.0

    same_solver = (config.prediction.method == config.correction.method
                   and config.prediction.rho == config.correction.rho)

    for k in range(K):
        tic = _time.perf_counter()
        if config.n_pred > 0:
            if config.strategy == "taylor":
                surrogate = dual_taylor_surrogate(cp, dp, w, cp.time_of(k))
            else:
                surrogate = cp.sample(k)
            st = anchor_dual_state(surrogate, config.prediction, w)
            st = run_dual_solver(surrogate, config.prediction, st,
                                 config.n_pred)
            w_hat, _, _ = dual_readout(surrogate, config.prediction, st)
        else:
            w_hat = w.copy()
        fc = cp.sample(k + 1)
        if config.n_corr > 0:
            if (config.n_pred > 0 and same_solver
                    and config.correction.method == "admm"):
                st = DualState(w=w_hat, z=st.z)
            else:
                st = anchor_dual_state(fc, config.correction, w_hat)
            st = run_dual_solver(fc, config.correction, st, config.n_corr)
            w, x, y = dual_readout(fc, config.correction, st)
        else:
            w = w_hat
            _, x, y = dual_readout(fc, config.correction, DualState(w=w))
        step_ms[k + 1] = (_time.perf_counter() - tic) * 1e3
        ws[k + 1], xs[k + 1] = w, x
        if ys.shape[1] > 0:
            ys[k + 1] = y
        dual_err[k + 1] = la.norm(w - w_opt[k + 1])
        x_err[k + 1] = la.norm(x - x_opt[k + 1])
        By_err[k + 1] = (la.norm(cp.B @ (y - y_opt[k + 1]))
                         if ys.shape[1] > 0 else 0.0)

    t = np.arange(K + 1) * cp.ts
    return DualRunTrace(t, ws, xs, ys, w_opt, x_opt, dual_err, x_err,
                        By_err, step_ms)


def primal_recovery_factors(cp, rho):
    """
    Multipliers turning a dual error into primal errors: ||A||/mu for x,
    ||B|| (1/rho + ||A||^2 / mu) for By.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    nA = la.norm(cp.A, 2)
    nB = la.norm(cp.B, 2) if cp.B.shape[1] > 0 else 0.0
    mu = cp.constants.mu
    return nA / mu, nB * (1 / rho + nA ** 2 / mu)
