#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Single-step primal solvers and the fixed-point driver.

Each solver is a contractive map T on an internal iterate z with a readout
x = X(z); for the gradient method, the proximal point algorithm and
forward-backward splitting the readout is the identity, while
Peaceman-Rachford reads out through prox of the smooth part. The function
:func:`make_spec` attaches the contraction factor and the Lipschitz/strong
monotonicity moduli of the readout to a chosen method and step-size.
"""

import numpy as np
from dataclasses import dataclass

PRIMAL_METHODS = ("gradient", "ppa", "fbs", "prs")
DUAL_METHODS = ("dual_ascent", "mm", "dual_fbs", "admm")


@dataclass(frozen=True)
class SolverSpec:
    """A solver identity with its step-size and (lambda, chi, beta) moduli."""

    method: str
    rho: float
    lam: float
    chi: float
    beta: float

    @property
    def rates(self):
        return (self.lam, self.chi, self.beta)


@dataclass
class SolverState:
    """Fixed-point iterate z with its primal readout x."""

    z: np.ndarray
    x: np.ndarray
    iterations: int = 0


def contraction_rates(method, rho, mu, L):
    """
    Contraction factor and readout moduli for a method and step-size.

    Returns
    -------
    (lam, chi, beta) : tuple of float

    Raises
    ------
    ValueError
        If `rho` violates the method's convergence condition.
    """
    if not (0 < mu <= L):
        raise ValueError("need 0 < mu <= L")
    if method in ("gradient", "fbs", "dual_ascent", "dual_fbs"):
        if not (0 < rho < 2 / L):
            raise ValueError(
                f"{method} requires step-size in (0, 2/L) = (0, {2 / L:g}), got {rho:g}")
        lam = max(abs(1 - rho * L), abs(1 - rho * mu))
        return lam, 1.0, 1.0
    if method in ("ppa", "mm"):
        if rho <= 0:
            raise ValueError(f"{method} requires a positive penalty, got {rho:g}")
        return 1 / (1 + rho * mu), 1.0, 1.0
    if method in ("prs", "admm"):
        if rho <= 0:
            raise ValueError(f"{method} requires a positive penalty, got {rho:g}")
        lam = max(abs(1 - rho * L) / (1 + rho * L), abs(1 - rho * mu) / (1 + rho * mu))
        return lam, 1 / (1 + rho * mu), 1 / (1 + rho * L)
    raise ValueError(f"unknown method {method!r}")


def default_rho(method, mu, L):
    """Default step-size: 2/(L+mu) for gradient-type, 1/sqrt(L mu) for
    splitting penalties, 1 for the proximal point algorithm."""
    if method in ("gradient", "fbs", "dual_ascent", "dual_fbs"):
        return 2 / (L + mu)
    if method in ("prs", "admm"):
        return 1 / np.sqrt(L * mu)
    return 1.0


def make_spec(method, rho, mu, L):
    lam, chi, beta = contraction_rates(method, rho, mu, L)
    return SolverSpec(method, float(rho), lam, chi, beta)


#%% SINGLE STEPS

def gradient_step(problem, x, rho):
    """One forward (gradient descent) step on the smooth part."""
    x = np.asarray(x, dtype=float)
    return x - rho * problem.smooth.grad(x)


def ppa_step(problem, x, rho):
    """One proximal point step, prox of the smooth part at x."""
    return problem.smooth.prox(rho, np.asarray(x, dtype=float))


def fbs_step(problem, x, rho):
    """Forward step on the smooth part, backward (prox) step on the rest."""
    x = np.asarray(x, dtype=float)
    return problem.nonsmooth.prox(rho, x - rho * problem.smooth.grad(x))


def prs_step(problem, state, rho):
    """
    One Peaceman-Rachford step on the auxiliary iterate.

    x = prox_{rho f}(z), y = prox_{rho g}(2x - z), z+ = z + 2(y - x), which
    realizes the full reflection composition refl_g o refl_f (the averaged
    variant z + (y - x) would only contract at (1 + lambda)/2). The readout
    x is stored on the returned state.
    """
    z = np.asarray(state.z, dtype=float)
    x = problem.smooth.prox(rho, z)
    y = problem.nonsmooth.prox(rho, 2 * x - z)
    return SolverState(z=z + 2 * (y - x), x=x, iterations=state.iterations + 1)


#%% STATE HANDLING AND DRIVER

def anchor_state(problem, spec, x):
    """
    Build a solver state whose readout is exactly `x`.

    For PRS the auxiliary iterate z = x + rho * grad f(x) satisfies
    prox_{rho f}(z) = x, so warm-starting from a primal point is exact;
    the other methods carry the primal iterate directly.
    """
    x = np.asarray(x, dtype=float)
    if spec.method == "prs":
        z = x + spec.rho * problem.smooth.grad(x)
        return SolverState(z=z, x=x.copy())
    return SolverState(z=x.copy(), x=x.copy())


def readout(problem, spec, state):
    """Primal point X(z) of a state (prox of the smooth part for PRS)."""
    if spec.method == "prs":
        return problem.smooth.prox(spec.rho, state.z)
    return np.asarray(state.z, dtype=float)


def solver_step(problem, spec, state):
    if spec.method == "gradient":
        x = gradient_step(problem, state.z, spec.rho)
    elif spec.method == "ppa":
        x = ppa_step(problem, state.z, spec.rho)
    elif spec.method == "fbs":
        x = fbs_step(problem, state.z, spec.rho)
    elif spec.method == "prs":
        return prs_step(problem, state, spec.rho)
    else:
        raise ValueError(f"not a primal method: {spec.method!r}")
    return SolverState(z=x, x=x.copy(), iterations=state.iterations + 1)


def run_solver(problem, spec, init, n_steps):
    """
    Apply exactly `n_steps` solver iterations (Banach-Picard) from `init`.

    Zero steps return the initial state unchanged, so the warm start is
    passed through untouched.
    """
    if n_steps < 0:
        raise ValueError("step count must be non-negative")
    state = init
    for _ in range(n_steps):
        state = solver_step(problem, spec, state)
    return state
