#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Closed-form convergence rates and asymptotic tracking-error radii.

Everything here is a pure function of the declared constants and the solver
rate triple; no problem oracles are touched. Radii whose convergence
condition fails come back as an infinity sentinel together with the name of
the violated condition, so regime tables can print divergent cells.
"""

import numpy as np
from dataclasses import dataclass, field

from .prediction import taylor_bound_coefficients


@dataclass(frozen=True)
class RateTriple:
    """Contraction factor and readout moduli (lambda, chi, beta)."""

    lam: float
    chi: float
    beta: float

    def __post_init__(self):
        if self.chi <= 0 or self.beta <= 0:
            raise ValueError("chi and beta must be positive")


def as_triple(r):
    """Accept a RateTriple, SolverSpec or plain 3-tuple."""
    if isinstance(r, RateTriple):
        return r
    if hasattr(r, "lam"):
        return RateTriple(r.lam, r.chi, r.beta)
    return RateTriple(*r)


def effective_triple(r_corr, r_pred):
    """
    Triple covering two different solvers used in the same scheme: the worse
    contraction factor and Lipschitz modulus with the weaker strong
    monotonicity.
    """
    a, b = as_triple(r_corr), as_triple(r_pred)
    return RateTriple(max(a.lam, b.lam), max(a.chi, b.chi), min(a.beta, b.beta))


def zeta(ell, r):
    """Error contraction after ell warm-started solver steps; zeta(0) = 1."""
    if ell < 0:
        raise ValueError("step count must be non-negative")
    r = as_triple(r)
    return 1.0 if ell == 0 else (r.chi / r.beta) * r.lam ** ell


def xi(ell, r):
    """Companion factor weighting the target shift; xi(0) = 0."""
    if ell < 0:
        raise ValueError("step count must be non-negative")
    r = as_triple(r)
    return 0.0 if ell == 0 else 1.0 + (r.chi / r.beta) * r.lam ** ell


@dataclass
class BoundReport:
    """An asymptotic radius with the conditions that guard it."""

    method: str
    radius: float
    conditions: dict = field(default_factory=dict)
    aux: dict = field(default_factory=dict)

    @property
    def converges(self):
        return all(ok for _, ok in self.conditions.values())


def _diverged(method, name, value, **aux):
    return BoundReport(method, np.inf, {name: (value, False)}, dict(aux))


#%% PRIMAL RADII

def bound_correction_only(nc, r, C0, D0, mu, ts):
    """Radius zeta/(1 - zeta) * (C0 Ts + D0)/mu of the correction-only scheme."""
    zc = zeta(nc, r)
    if zc >= 1:
        return _diverged("correction_only", "zeta(N_C) < 1", zc)
    # association order shared with the taylor/extrapolation radii so the
    # N_P = 0 reduction identity holds exactly in floating point
    radius = zc * ((C0 * ts + D0) / mu) / (1 - zc)
    return BoundReport("correction_only", radius, {"zeta(N_C) < 1": (zc, True)})


def bound_prediction_only(np_steps, r, C0, D0, mu, ts):
    """Radius 1/(1 - zeta) * (C0 Ts + D0)/mu of the prediction-only scheme."""
    zp = zeta(np_steps, r)
    if zp >= 1:
        return _diverged("prediction_only", "zeta(N_P) < 1", zp)
    radius = (C0 * ts + D0) / (mu * (1 - zp))
    return BoundReport("prediction_only", radius, {"zeta(N_P) < 1": (zp, True)})


def bound_taylor(np_steps, nc, r, constants, ts, r_pred=None):
    """
    Radius of prediction-correction with the Taylor surrogate under the
    linear error bound. Requires zeta_C (zeta_P + 2 kappa xi_P) < 1.
    """
    c = constants
    rc = as_triple(r)
    rp = rc if r_pred is None else as_triple(r_pred)
    zc, zp, xp = zeta(nc, rc), zeta(np_steps, rp), xi(np_steps, rp)
    kappa = c.L / c.mu
    cond = zc * (zp + 2 * kappa * xp)
    if cond >= 1:
        return _diverged("taylor", "zeta_C (zeta_P + 2 kappa xi_P) < 1", cond)
    radius = (zc * ((c.C0 * ts + c.D0) / c.mu)
              * (zp + 2 * (1 + kappa) * xp) / (1 - cond))
    return BoundReport("taylor", radius,
                       {"zeta_C (zeta_P + 2 kappa xi_P) < 1": (cond, True)})


def bound_taylor_quadratic(np_steps, nc, r, constants, ts, gamma=None,
                           r_pred=None, fd=False):
    """
    Radius under the quadratic Taylor error bound, with the maximal sampling
    period Ts_bar and attraction radius R_bar of the local result.

    `gamma` must lie in (zeta_C (zeta_P + xi_P C1 D0 / mu^2), 1); it
    defaults to the midpoint of that interval.
    """
    c = constants
    rc = as_triple(r)
    rp = rc if r_pred is None else as_triple(r_pred)
    zc, zp, xp = zeta(nc, rc), zeta(np_steps, rp), xi(np_steps, rp)
    C4, C5, C6 = taylor_bound_coefficients(c, ts, fd=fd)
    lower = zc * (zp + xp * c.C1 * c.D0 / c.mu ** 2)
    if gamma is None:
        gamma = 0.5 * (lower + 1)
    aux = {"C4": C4, "C5": C5, "C6": C6, "gamma": gamma}
    if not (0 < gamma < 1) or gamma <= lower:
        return _diverged("taylor_quadratic",
                         "gamma in (zeta_C (zeta_P + xi_P C1 D0/mu^2), 1)",
                         gamma, **aux)
    drift = c.C0 * c.C1 / c.mu ** 2 + c.C2 / c.mu
    if xp * drift > 0:
        ts_bar = (gamma - lower) / (zc * xp * drift)
    else:
        ts_bar = np.inf
    if c.C1 > 0 and np.isfinite(ts_bar):
        r_bar = (2 * c.mu / c.C1) * drift * (ts_bar - ts)
    else:
        r_bar = np.inf
    aux.update(ts_bar=ts_bar, r_bar=r_bar)
    conditions = {"gamma in (lower, 1)": (gamma, True),
                  "Ts < Ts_bar": (ts, ts < ts_bar)}
    if ts >= ts_bar:
        return BoundReport("taylor_quadratic", np.inf, conditions, aux)
    radius = zc / (1 - gamma) * (zp * (c.C0 * ts + c.D0) / c.mu
                                 + xp * (C5 * ts ** 2 / 2 + C6 * c.D0))
    return BoundReport("taylor_quadratic", radius, conditions, aux)


def bound_extrapolation(np_steps, nc, r, constants, ts, r_pred=None):
    """
    Radius of prediction-correction with the extrapolation surrogate.
    Requires a time-invariant Hessian (C2 = 0) and zeta_C zeta_P < 1.
    """
    c = constants
    if c.C2 != 0:
        raise ValueError("extrapolation bound requires C2 = 0")
    rc = as_triple(r)
    rp = rc if r_pred is None else as_triple(r_pred)
    zc, zp, xp = zeta(nc, rc), zeta(np_steps, rp), xi(np_steps, rp)
    cond = zc * zp
    if cond >= 1:
        return _diverged("extrapolation", "zeta_C zeta_P < 1", cond)
    radius = zc * ((zp * (c.C0 * ts) + c.C3 * xp * ts ** 2
                    + c.D0 * (zp + xp)) / c.mu) / (1 - cond)
    return BoundReport("extrapolation", radius, {"zeta_C zeta_P < 1": (cond, True)})


#%% DUAL RADIUS

def bound_dual(np_steps, nc, r, mu_bar, kappa_bar, C0_bar, D0_bar, ts,
               rho, norm_A, norm_B, mu, r_pred=None):
    """
    Dual-space radius of the dual prediction-correction scheme, plus the
    induced primal radii for x and By.
    """
    rc = as_triple(r)
    rp = rc if r_pred is None else as_triple(r_pred)
    zc, zp, xp = zeta(nc, rc), zeta(np_steps, rp), xi(np_steps, rp)
    cond = zc * (zp + 2 * kappa_bar * xp)
    if cond >= 1:
        rep = _diverged("dual", "zeta_C (zeta_P + 2 kappa_bar xi_P) < 1", cond)
        rep.aux.update(x_radius=np.inf, By_radius=np.inf)
        return rep
    radius = (zc * (C0_bar * ts + D0_bar) / mu_bar
              * (zp + 2 * (1 + kappa_bar) * xp) / (1 - cond))
    fx = norm_A / mu
    fby = norm_B * (1 / rho + norm_A ** 2 / mu)
    return BoundReport("dual", radius,
                       {"zeta_C (zeta_P + 2 kappa_bar xi_P) < 1": (cond, True)},
                       {"x_radius": fx * radius, "By_radius": fby * radius,
                        "fx": fx, "fBy": fby})


#%% REGIME TABLE AND ITERATED BOUND

def regime_table(constants, r, np_steps, nc, ts):
    """
    Asymptotic-radius expressions of the four methods under the exact
    prediction and poor prediction regimes, evaluated numerically.

    Normalized setting: D0 = 0, C2 = 0, mu = 1.
    """
    c = constants
    if c.D0 != 0 or c.C2 != 0 or c.mu != 1:
        raise ValueError("regime table assumes D0 = 0, C2 = 0, mu = 1")
    rr = as_triple(r)
    zc = zeta(nc, rr)
    q = zc / (1 - zc) if zc < 1 else np.inf
    C7 = c.C0 ** 2 * c.C1 + c.C3
    taylor_c = c.C3 if c.C1 == 0 else C7
    table = {
        "exact_pred": {
            "correction_only": q * c.C0 * ts,
            "prediction_only": c.C0 * ts,
            "taylor": zc * taylor_c * ts ** 2 / 2,
            "extrapolation": zc * c.C3 * ts ** 2,
        },
        "poor_pred": {
            "correction_only": q * c.C0 * ts,
            "prediction_only": np.inf,
            "taylor": q * (c.C0 * ts + taylor_c * ts ** 2),
            "extrapolation": q * (c.C0 * ts + 2 * c.C3 * ts ** 2),
        },
    }
    return table


def iterated_bound(k, r, np_steps, nc, sigma, tau, e0, r_pred=None):
    """
    Tracking-error bound after k sampling steps with constant per-step
    drift sigma and prediction error tau, in closed geometric form.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    rc = as_triple(r)
    rp = rc if r_pred is None else as_triple(r_pred)
    zc, zp, xp = zeta(nc, rc), zeta(np_steps, rp), xi(np_steps, rp)
    rho = zc * zp
    drive = zc * (zp * sigma + xp * tau)
    if k == 0:
        return float(e0)
    if abs(rho - 1) < 1e-15:
        tail = k * drive
    else:
        tail = drive * (1 - rho ** k) / (1 - rho)
    return rho ** k * e0 + tail


def limsup_bound(r, np_steps, nc, sigma, tau, r_pred=None):
    """Limit of :func:`iterated_bound` as k grows, when it exists."""
    rc = as_triple(r)
    rp = rc if r_pred is None else as_triple(r_pred)
    zc, zp, xp = zeta(nc, rc), zeta(np_steps, rp), xi(np_steps, rp)
    if zc * zp >= 1:
        return np.inf
    return zc * (zp * sigma + xp * tau) / (1 - zc * zp)
