#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Prediction strategies: build a surrogate of the next sampled problem.

All strategies forecast only the smooth part; the non-smooth part is always
carried over one-step-back. The Taylor surrogate is an explicit quadratic
(anchor, gradient, Hessian), so its prox is a linear solve and it can be
handed to any solver, Peaceman-Rachford included.
"""

import numpy as np
from dataclasses import dataclass

from .problem import (FrozenSmooth, FrozenNonsmooth, QuadraticSmooth,
                      finite_diff_dt_grad)

STRATEGY_NAMES = ("osb", "taylor", "taylor_fd", "extrapolation")


@dataclass(frozen=True)
class Surrogate:
    """A predicted problem with the same frozen-oracle interface as a sample."""

    smooth: FrozenSmooth
    nonsmooth: FrozenNonsmooth
    provenance: str
    anchor_x: np.ndarray
    anchor_t: float

    @property
    def dim(self):
        return self.smooth.dim


def one_step_back(f_k, g_k, x_k, t_k):
    """Reuse the last observed costs unchanged as the forecast."""
    return Surrogate(f_k, g_k, "one_step_back", np.asarray(x_k, float), t_k)


def taylor_surrogate(problem, x_k, t_k, ts, dt_mode="exact", f_km1=None):
    """
    Quadratic surrogate from a first-order expansion of the gradient in
    time and space around (x_k, t_k).

    The surrogate gradient is
    ``grad f(x_k) + Ts * dt_grad f(x_k) + hess f(x_k) (x - x_k)``
    so its Hessian is the sampled Hessian, constant in x.

    Parameters
    ----------
    problem : TimeVaryingProblem
    dt_mode : {"exact", "fd"}
        Exact time derivative of the gradient, or the backward finite
        difference built from the previous sample `f_km1`.
    """
    x_k = np.asarray(x_k, dtype=float)
    sc = problem.smooth
    g = sc.grad(x_k, t_k)
    H = sc.hessian(x_k, t_k)
    if dt_mode == "exact":
        dtg = sc.dt_grad(x_k, t_k)
        tag = "taylor"
    elif dt_mode == "fd":
        if f_km1 is None:
            raise ValueError("finite-difference mode needs the previous sample")
        dtg = finite_diff_dt_grad(sc.freeze(t_k), f_km1, x_k, ts)
        tag = "taylor_fd"
    else:
        raise ValueError(f"unknown dt_mode {dt_mode!r}")
    smooth = QuadraticSmooth(H, g + ts * dtg, x_k)
    g_hat = problem.nonsmooth.freeze(t_k)
    return Surrogate(smooth, g_hat, tag, x_k, t_k)


def extrapolation_surrogate(f_k, f_km1, g_k, x_k, t_k, c2=0.0):
    """
    Linear extrapolation of the cost itself: f_hat = 2 f_k - f_{k-1}.

    Valid only when the Hessian does not vary in time (C2 = 0), which keeps
    the combination strongly convex with the same moduli.
    """
    if c2 != 0:
        raise ValueError("extrapolation requires a time-invariant Hessian (C2 = 0)")
    dim = f_k.dim
    smooth = FrozenSmooth(
        dim,
        lambda x: 2 * f_k.value(x) - f_km1.value(x),
        lambda x: 2 * f_k.grad(x) - f_km1.grad(x),
        lambda x: 2 * f_k.hessian(x) - f_km1.hessian(x),
    )
    return Surrogate(smooth, g_k, "extrapolation", np.asarray(x_k, float), t_k)


def interpolation_coefficients(I):
    """
    Lagrange extrapolation weights at the next sampling instant from the
    last I samples: ell_i = prod_{j != i} j / (j - i), i = 1..I.
    """
    if I < 1:
        raise ValueError("need at least one interpolation node")
    coeffs = []
    for i in range(1, I + 1):
        w = 1.0
        for j in range(1, I + 1):
            if j != i:
                w *= j / (j - i)
        coeffs.append(w)
    return coeffs


#%% STRATEGY DRIVER

@dataclass(frozen=True)
class PredictionStrategy:
    """
    Named strategy with the history bookkeeping the surrogates need.

    Strategies that need two samples ("extrapolation", "taylor_fd") fall
    back to one-step-back at k = 0; :meth:`build` reports the provenance
    actually used so error bounds can match it.
    """

    name: str

    def __post_init__(self):
        if self.name not in STRATEGY_NAMES:
            raise ValueError(f"unknown strategy {self.name!r}; "
                             f"choose from {STRATEGY_NAMES}")

    def build(self, problem, k, x_k):
        """Surrogate of the problem at t_{k+1} from information up to t_k."""
        t_k = problem.time_of(k)
        sk = problem.sample(k)
        if self.name == "osb":
            return one_step_back(sk.smooth, sk.nonsmooth, x_k, t_k)
        if self.name == "taylor":
            return taylor_surrogate(problem, x_k, t_k, problem.ts, "exact")
        if k == 0:  # no history yet
            return one_step_back(sk.smooth, sk.nonsmooth, x_k, t_k)
        prev = problem.sample(k - 1)
        if self.name == "taylor_fd":
            return taylor_surrogate(problem, x_k, t_k, problem.ts, "fd",
                                    f_km1=prev.smooth)
        return extrapolation_surrogate(sk.smooth, prev.smooth, sk.nonsmooth,
                                       x_k, t_k, c2=problem.constants.C2)


#%% PREDICTION ERROR BOUNDS

def prediction_error_bound(strategy, constants, ts, current_error=0.0):
    """
    Worst-case distance between the surrogate minimizer and the true next
    optimizer, by strategy.

    One-step-back: (C0 Ts + D0) / mu. Taylor: the tighter of the linear
    bound 2 (L/mu) e + 2 (C0 Ts + D0)(1 + L/mu)/mu and the quadratic bound
    C1 e^2 / (2 mu) + C4 e + C5 Ts^2 / 2 + C6 D0. Finite-difference Taylor:
    the same with C5 replaced by C5 + C3/mu. Extrapolation:
    (C3 Ts^2 + D0) / mu.

    `current_error` is the warm-start distance ``||x_k - x*_k||`` the Taylor
    surrogate is anchored at.
    """
    c = constants
    osb = (c.C0 * ts + c.D0) / c.mu
    if strategy in ("osb", "one_step_back"):
        return osb
    if strategy in ("extrapolation",):
        return (c.C3 * ts ** 2 + c.D0) / c.mu
    if strategy in ("taylor", "taylor_fd"):
        e = current_error
        linear = 2 * (c.L / c.mu) * e + 2 * osb * (1 + c.L / c.mu)
        C4 = ts * (c.C0 * c.C1 / c.mu ** 2 + c.C2 / c.mu) + c.C1 * c.D0 / c.mu ** 2
        C5 = (c.C0 ** 2 * c.C1 / c.mu ** 3 + 2 * c.C0 * c.C2 / c.mu ** 2
              + c.C3 / c.mu)
        if strategy == "taylor_fd":
            C5 = C5 + c.C3 / c.mu
        C6 = (ts * (c.C0 * c.C1 / c.mu + c.C2) / c.mu ** 2
              + (1 + c.C1 * c.D0 / (2 * c.mu ** 2)) / c.mu)
        quadratic = (c.C1 / (2 * c.mu) * e ** 2 + C4 * e
                     + C5 * ts ** 2 / 2 + C6 * c.D0)
        return min(linear, quadratic)
    raise ValueError(f"unknown strategy {strategy!r}")


def taylor_bound_coefficients(constants, ts, fd=False):
    """The (C4, C5, C6) coefficients of the quadratic Taylor error bound."""
    c = constants
    C4 = ts * (c.C0 * c.C1 / c.mu ** 2 + c.C2 / c.mu) + c.C1 * c.D0 / c.mu ** 2
    C5 = c.C0 ** 2 * c.C1 / c.mu ** 3 + 2 * c.C0 * c.C2 / c.mu ** 2 + c.C3 / c.mu
    if fd:
        C5 = C5 + c.C3 / c.mu
    C6 = (ts * (c.C0 * c.C1 / c.mu + c.C2) / c.mu ** 2
          + (1 + c.C1 * c.D0 / (2 * c.mu ** 2)) / c.mu)
    return C4, C5, C6
