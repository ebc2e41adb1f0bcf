#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Named problem presets selectable from the command line.

Each factory takes the sampling period and returns a fully declared
problem, primal or constrained, with its regularity constants.
"""

import numpy as np

from .problem import (SmoothCost, NonsmoothCost, RegularityConstants,
                      TimeVaryingProblem)
from .dual import ConstrainedProblem

OMEGA = 0.02 * np.pi
EPSILON = 7.5
PHI = 1.75
NU = 0.5


def tracking_l1_logistic(ts=0.1):
    """
    Scalar benchmark: a quadratic tracking term around a sinusoidal target
    plus a logistic penalty, regularized by an l1 term.

    f(x;t) = (x - cos(omega t))^2 / 2 + epsilon log(1 + exp(phi x)),
    g(x) = nu |x|.
    """
    w, eps, phi = OMEGA, EPSILON, PHI

    def sig(x):
        # numerically safe logistic
        return 0.5 * (1 + np.tanh(0.5 * x))

    smooth = SmoothCost(
        1,
        value=lambda x, t: (0.5 * (x[0] - np.cos(w * t)) ** 2
                            + eps * np.logaddexp(0.0, phi * x[0])),
        grad=lambda x, t: np.array([x[0] - np.cos(w * t)
                                    + eps * phi * sig(phi * x[0])]),
        hessian=lambda x, t: np.array(
            [[1 + eps * phi ** 2 * sig(phi * x[0]) * (1 - sig(phi * x[0]))]]),
        dt_grad=lambda x, t: np.array([w * np.sin(w * t)]),
        dtt_grad=lambda x, t: np.array([w ** 2 * np.cos(w * t)]),
    )
    nonsmooth = NonsmoothCost.l1(1, weight=NU)
    # max |sigma''| over the logistic is 1/(6 sqrt(3)), attained where the
    # sigmoid equals (3 +- sqrt(3))/6; it scales the third derivative in x
    c1 = eps * phi ** 3 / (6 * np.sqrt(3))
    constants = RegularityConstants(
        mu=1.0, L=1 + eps * phi ** 2 / 4,
        C0=w, C1=c1, C2=0.0, C3=w ** 2, D0=0.0,
    )
    return TimeVaryingProblem(smooth, nonsmooth, constants, ts)


def quadratic_sine_drift(ts=0.1):
    """f(x;t) = x^2/2 - sin(t) x with g = nu |x|; optimum soft_nu(sin t)."""
    smooth = SmoothCost(
        1,
        value=lambda x, t: 0.5 * x[0] ** 2 - np.sin(t) * x[0],
        grad=lambda x, t: np.array([x[0] - np.sin(t)]),
        hessian=lambda x, t: np.array([[1.0]]),
        dt_grad=lambda x, t: np.array([-np.cos(t)]),
        dtt_grad=lambda x, t: np.array([np.sin(t)]),
    )
    nonsmooth = NonsmoothCost.l1(1, weight=NU)
    constants = RegularityConstants(mu=1.0, L=1.0, C0=1.0, C1=0.0, C2=0.0,
                                    C3=1.0, D0=0.0)
    return TimeVaryingProblem(smooth, nonsmooth, constants, ts)


def _drifting_target_cost(b, db, ddb, dim):
    """Smooth cost ||x - b(t)||^2 / 2 for a drifting target b(t)."""
    return SmoothCost(
        dim,
        value=lambda x, t: 0.5 * float(np.sum((x - b(t)) ** 2)),
        grad=lambda x, t: x - b(t),
        hessian=lambda x, t: np.eye(dim),
        dt_grad=lambda x, t: -db(t),
        dtt_grad=lambda x, t: -ddb(t),
    )


def constrained_tracking_qp(ts=0.1):
    """Two-variable drifting QP with a single equality constraint."""
    b = lambda t: np.array([np.sin(t), np.cos(t)])
    db = lambda t: np.array([np.cos(t), -np.sin(t)])
    ddb = lambda t: np.array([-np.sin(t), -np.cos(t)])
    smooth = _drifting_target_cost(b, db, ddb, 2)
    constants = RegularityConstants(mu=1.0, L=1.0, C0=1.0, C3=1.0)
    return ConstrainedProblem(f=smooth, A=np.array([[1.0, 1.0]]),
                              c=np.array([1.0]), constants=constants, ts=ts)


def tv_equality_qp(ts=0.1):
    """
    Three-variable QP with two equality constraints and a sinusoidally
    drifting target; the constraint matrix is well conditioned.
    """
    v = np.array([1.0, -0.5, 0.25])
    b = lambda t: v * np.sin(t)
    db = lambda t: v * np.cos(t)
    ddb = lambda t: -v * np.sin(t)
    smooth = _drifting_target_cost(b, db, ddb, 3)
    nv = float(np.linalg.norm(v))
    constants = RegularityConstants(mu=1.0, L=1.0, C0=nv, C3=nv)
    A = np.array([[1.0, 0.0, 0.0],
                  [0.0, 1.0, 1.0]])
    return ConstrainedProblem(f=smooth, A=A, c=np.array([0.5, 1.0]),
                              constants=constants, ts=ts)


def tv_sharing(ts=0.1):
    """
    Sharing-style split: min f(x;t) + nu ||y||_1 subject to Ax - y = 0,
    carrying the l1 term on a separate variable through B = -I.
    """
    b = lambda t: np.array([np.sin(t), 0.5 * np.cos(t)])
    db = lambda t: np.array([np.cos(t), -0.5 * np.sin(t)])
    ddb = lambda t: np.array([-np.sin(t), -0.5 * np.cos(t)])
    smooth = _drifting_target_cost(b, db, ddb, 2)
    nv = float(np.linalg.norm([1.0, 0.5]))
    constants = RegularityConstants(mu=1.0, L=1.0, C0=nv, C3=nv)
    A = np.array([[1.0, 0.5],
                  [0.0, 1.0]])
    h = NonsmoothCost.l1(2, weight=NU)
    return ConstrainedProblem(f=smooth, A=A, c=np.zeros(2),
                              constants=constants, ts=ts, h=h,
                              B=-np.eye(2), d0_bar=0.0)


PRESETS = {
    "paper_sec7": tracking_l1_logistic,
    "quadratic_drift": quadratic_sine_drift,
    "constrained_qp": constrained_tracking_qp,
    "tv_qp_eq": tv_equality_qp,
    "tv_sharing": tv_sharing,
}


def get_preset(name, ts=0.1):
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: "
                       + ", ".join(sorted(PRESETS)))
    return PRESETS[name](ts)


def is_constrained(problem):
    return isinstance(problem, ConstrainedProblem)
