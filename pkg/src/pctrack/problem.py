#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Time-varying composite problems and their sampled (frozen-time) instances.

A problem is a pair of oracle bundles: a smooth, strongly convex cost
``f(x; t)`` with its derivatives, and a non-smooth convex cost ``g(x; t)``
accessed through its proximal operator. Sampling at ``t_k = k Ts`` freezes
both into time-invariant oracles that the solvers consume.
"""

import numpy as np
from numpy import linalg as la
from dataclasses import dataclass, field


class ProxSolveError(RuntimeError):
    """Raised when an inner proximal/argmin Newton solve does not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def _as_vector(x, dim):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (dim,):
        raise ValueError(f"expected vector of shape ({dim},), got {x.shape}")
    return x


def _fd_step(x):
    return max(1e-6, 1e-6 * float(la.norm(x)))


def newton_argmin(value, grad, hessian, x0, tol=1e-10, max_iter=100):
    """
    Minimize a smooth strongly convex function by safeguarded Newton.

    Backtracking (Armijo) line search on the objective; terminates when the
    gradient norm drops below `tol`.

    Raises
    ------
    ProxSolveError
        If the gradient norm is still above `tol` after `max_iter` iterations.
    """
    x = np.array(x0, dtype=float)
    n = x.size
    for _ in range(max_iter):
        r = grad(x)
        rn = la.norm(r)
        if rn <= tol:
            return x
        H = np.atleast_2d(hessian(x))
        try:
            d = la.solve(H, -r)
        except la.LinAlgError:
            d = -r
        slope = float(r @ d)
        if slope >= 0:  # not a descent direction, fall back to gradient
            d = -r
            slope = -rn ** 2
        t, f0 = 1.0, value(x)
        # the noise term keeps the test meaningful on the floating-point
        # plateau around the minimizer, where Armijo decrease is unresolvable
        noise = 1e-12 * (abs(f0) + 1)
        while t > 1e-14 and value(x + t * d) > f0 + 1e-4 * t * slope + noise:
            t *= 0.5
        x = x + t * d
    raise ProxSolveError(
        f"inner Newton did not reach tolerance {tol:g} in {max_iter} iterations",
        residual=rn,
    )


#%% SMOOTH COSTS

class SmoothCost:
    """
    Smooth time-varying cost ``f(x; t)`` given as a bundle of oracles.

    Parameters
    ----------
    dim : int
        Dimension n of the x variable.
    value, grad : callable
        ``value(x, t) -> float`` and ``grad(x, t) -> (n,) array``.
    hessian : callable, optional
        ``hessian(x, t) -> (n, n) array``; finite differences of `grad`
        are used when omitted.
    dt_grad, dtt_grad : callable, optional
        First and second time derivatives of the gradient; backward/central
        finite differences in t are used when omitted.
    """

    def __init__(self, dim, value, grad, hessian=None, dt_grad=None, dtt_grad=None):
        self.dim = int(dim)
        self._value, self._grad = value, grad
        self._hessian, self._dt_grad, self._dtt_grad = hessian, dt_grad, dtt_grad

    @property
    def has_dt_grad(self):
        return self._dt_grad is not None

    def value(self, x, t):
        return float(self._value(_as_vector(x, self.dim), t))

    def grad(self, x, t):
        return np.asarray(self._grad(_as_vector(x, self.dim), t), dtype=float).reshape(self.dim)

    def hessian(self, x, t):
        x = _as_vector(x, self.dim)
        if self._hessian is not None:
            return np.asarray(self._hessian(x, t), dtype=float).reshape(self.dim, self.dim)
        h = _fd_step(x)
        H = np.empty((self.dim, self.dim))
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = h
            H[:, j] = (self.grad(x + e, t) - self.grad(x - e, t)) / (2 * h)
        return 0.5 * (H + H.T)

    def dt_grad(self, x, t):
        x = _as_vector(x, self.dim)
        if self._dt_grad is not None:
            return np.asarray(self._dt_grad(x, t), dtype=float).reshape(self.dim)
        h = 1e-6
        return (self.grad(x, t + h) - self.grad(x, t - h)) / (2 * h)

    def dtt_grad(self, x, t):
        x = _as_vector(x, self.dim)
        if self._dtt_grad is not None:
            return np.asarray(self._dtt_grad(x, t), dtype=float).reshape(self.dim)
        h = 1e-4
        return (self.dt_grad(x, t + h) - self.dt_grad(x, t - h)) / (2 * h)

    def freeze(self, t):
        """Return the frozen-time oracle f(.; t) as a :class:`FrozenSmooth`."""
        return FrozenSmooth(
            self.dim,
            lambda x: self.value(x, t),
            lambda x: self.grad(x, t),
            lambda x: self.hessian(x, t),
        )


class FrozenSmooth:
    """Smooth cost frozen at a fixed time; prox computed by inner Newton."""

    def __init__(self, dim, value, grad, hessian):
        self.dim = int(dim)
        self.value, self.grad, self.hessian = value, grad, hessian

    def prox(self, rho, v):
        """prox of the frozen cost: argmin f(y) + ||y - v||^2 / (2 rho)."""
        v = _as_vector(v, self.dim)
        return newton_argmin(
            lambda y: self.value(y) + la.norm(y - v) ** 2 / (2 * rho),
            lambda y: self.grad(y) + (y - v) / rho,
            lambda y: self.hessian(y) + np.eye(self.dim) / rho,
            v,
        )


class QuadraticSmooth(FrozenSmooth):
    """
    Frozen quadratic cost ``c0 + <g0, x - x0> + (x - x0)' H (x - x0) / 2``.

    Used for Taylor surrogates and sampled quadratic problems; its prox and
    unconstrained minimizer are available in closed form.
    """

    def __init__(self, hess, g0, x0, c0=0.0):
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        dim = x0.size
        self.H = np.asarray(hess, dtype=float).reshape(dim, dim)
        self.g0 = np.asarray(g0, dtype=float).reshape(dim)
        self.x0 = x0
        self.c0 = float(c0)
        super().__init__(dim, self._q_value, self._q_grad, lambda x: self.H)

    def _q_value(self, x):
        d = _as_vector(x, self.dim) - self.x0
        return self.c0 + float(self.g0 @ d) + 0.5 * float(d @ self.H @ d)

    def _q_grad(self, x):
        return self.g0 + self.H @ (_as_vector(x, self.dim) - self.x0)

    def prox(self, rho, v):
        v = _as_vector(v, self.dim)
        A = np.eye(self.dim) + rho * self.H
        return la.solve(A, v + rho * (self.H @ self.x0 - self.g0))

    def minimizer(self):
        return self.x0 - la.solve(self.H, self.g0)


#%% NON-SMOOTH COSTS

def soft_threshold(v, thr):
    return np.sign(v) * np.maximum(np.abs(v) - thr, 0.0)


class NonsmoothCost:
    """
    Non-smooth convex cost ``g(x; t)`` accessed via value/prox/subgradient.

    Use the constructors :meth:`zero`, :meth:`l1`, :meth:`box` and
    :meth:`halfspace` for the common cases; `kind` tags the structure so
    downstream code can exploit closed forms.
    """

    def __init__(self, dim, value, prox, subgrad=None, kind="custom", time_varying=False):
        self.dim = int(dim)
        self._value, self._prox, self._subgrad = value, prox, subgrad
        self.kind = kind
        self.time_varying = bool(time_varying)

    @classmethod
    def zero(cls, dim):
        return cls(dim, lambda x, t: 0.0, lambda rho, v, t: np.asarray(v, float),
                   subgrad=lambda x, t: np.zeros(dim), kind="zero")

    @classmethod
    def l1(cls, dim, weight=1.0, weight_fn=None):
        """weight * ||x||_1; `weight_fn(t)` makes the weight time-varying."""
        w = (lambda t: float(weight_fn(t))) if weight_fn else (lambda t: float(weight))
        return cls(
            dim,
            lambda x, t: w(t) * float(np.sum(np.abs(x))),
            lambda rho, v, t: soft_threshold(np.asarray(v, float), rho * w(t)),
            subgrad=lambda x, t: w(t) * np.sign(x),
            kind="l1",
            time_varying=weight_fn is not None,
        )

    @classmethod
    def box(cls, lo, hi):
        lo, hi = np.atleast_1d(np.asarray(lo, float)), np.atleast_1d(np.asarray(hi, float))

        def value(x, t):
            return 0.0 if np.all(x >= lo - 1e-12) and np.all(x <= hi + 1e-12) else np.inf

        return cls(lo.size, value, lambda rho, v, t: np.clip(v, lo, hi),
                   subgrad=lambda x, t: np.zeros(lo.size), kind="indicator")

    @classmethod
    def halfspace(cls, a, b):
        """Indicator of the halfspace {x : <a, x> <= b}."""
        a = np.atleast_1d(np.asarray(a, float))
        nrm2 = float(a @ a)

        def value(x, t):
            return 0.0 if float(a @ x) <= b + 1e-12 else np.inf

        def prox(rho, v, t):
            v = np.asarray(v, float)
            excess = float(a @ v) - b
            return v - max(excess, 0.0) / nrm2 * a

        return cls(a.size, value, prox, subgrad=lambda x, t: np.zeros(a.size),
                   kind="indicator")

    def value(self, x, t):
        return float(self._value(_as_vector(x, self.dim), t))

    def prox(self, rho, v, t):
        return np.asarray(self._prox(rho, _as_vector(v, self.dim), t), dtype=float).reshape(self.dim)

    def subgrad(self, x, t):
        if self._subgrad is None:
            raise NotImplementedError("no subgradient oracle supplied")
        return np.asarray(self._subgrad(_as_vector(x, self.dim), t), dtype=float).reshape(self.dim)

    def freeze(self, t):
        return FrozenNonsmooth(
            self.dim,
            lambda x: self.value(x, t),
            lambda rho, v: self.prox(rho, v, t),
            (lambda x: self.subgrad(x, t)) if self._subgrad is not None else None,
            kind=self.kind,
        )


class FrozenNonsmooth:
    """Non-smooth cost frozen at a fixed time."""

    def __init__(self, dim, value, prox, subgrad=None, kind="custom"):
        self.dim = int(dim)
        self.value, self.prox = value, prox
        self._subgrad = subgrad
        self.kind = kind

    def subgrad(self, x):
        if self._subgrad is None:
            raise NotImplementedError("no subgradient oracle supplied")
        return self._subgrad(x)


#%% PROBLEM CONTAINERS

@dataclass(frozen=True)
class RegularityConstants:
    """Declared regularity constants of a problem (all non-negative, L >= mu)."""

    mu: float
    L: float
    C0: float = 0.0
    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0
    D0: float = 0.0

    def __post_init__(self):
        if not (self.mu > 0):
            raise ValueError("mu must be positive")
        if self.L < self.mu:
            raise ValueError("L must satisfy L >= mu")
        for name in ("C0", "C1", "C2", "C3", "D0"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative")

    @property
    def kappa(self):
        return self.L / self.mu


@dataclass(frozen=True)
class TimeVaryingProblem:
    """A time-varying composite problem f(x;t) + g(x;t) sampled every Ts."""

    smooth: SmoothCost
    nonsmooth: NonsmoothCost
    constants: RegularityConstants
    ts: float

    def __post_init__(self):
        if not (0 < self.ts < 1):
            raise ValueError("sampling period Ts must lie in (0, 1)")
        if self.smooth.dim != self.nonsmooth.dim:
            raise ValueError("smooth and nonsmooth dimensions disagree")

    @property
    def dim(self):
        return self.smooth.dim

    def time_of(self, k):
        return k * self.ts

    def sample(self, k):
        """Freeze the problem at t_k = k * Ts."""
        if k < 0:
            raise ValueError("sample index must be non-negative")
        t = self.time_of(k)
        return SampledProblem(self.smooth.freeze(t), self.nonsmooth.freeze(t),
                              t=t, k=k, dim=self.dim)


@dataclass(frozen=True)
class SampledProblem:
    """Frozen-time instance of a :class:`TimeVaryingProblem`."""

    smooth: FrozenSmooth
    nonsmooth: FrozenNonsmooth
    t: float
    k: int
    dim: int

    def optimality_residual(self, x, rho=1.0):
        """Norm of the fixed-point residual of one FBS step at `x`."""
        x = _as_vector(x, self.dim)
        step = self.nonsmooth.prox(rho, x - rho * self.smooth.grad(x))
        return float(la.norm(x - step)) / rho


def finite_diff_dt_grad(f_k, f_km1, x, ts):
    """
    Backward finite-difference estimate of the time derivative of the
    gradient: (grad f_k(x) - grad f_{k-1}(x)) / Ts.
    """
    if ts <= 0:
        raise ValueError("Ts must be positive")
    return (f_k.grad(x) - f_km1.grad(x)) / ts


#%% CONSTANT VALIDATION

@dataclass
class ConstantReport:
    """Empirical estimates of the regularity constants over a probe grid."""

    hess_min: float
    hess_max: float
    c0_observed: float
    c1_observed: float
    c2_observed: float
    c3_observed: float
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def validate_constants(problem, grid, rel_tol=1e-6, rng=None):
    """
    Probe the declared constants of `problem` on a grid of (x, t) pairs.

    Hessian eigenvalues are checked against [mu, L], the time derivative of
    the gradient against C0, and finite-difference estimates of the third
    derivatives against C1, C2, C3. Violations are collected in the report,
    never raised.
    """
    if len(grid) == 0:
        raise ValueError("probe grid must be non-empty")
    rng = np.random.default_rng(0) if rng is None else rng
    c = problem.constants
    sc = problem.smooth
    hess_min, hess_max = np.inf, -np.inf
    c0_obs = c1_obs = c2_obs = c3_obs = 0.0
    dirs = rng.standard_normal((4, sc.dim))
    dirs /= la.norm(dirs, axis=1, keepdims=True)

    for x, t in grid:
        x = _as_vector(x, sc.dim)
        ev = la.eigvalsh(sc.hessian(x, t))
        hess_min, hess_max = min(hess_min, ev[0]), max(hess_max, ev[-1])
        c0_obs = max(c0_obs, la.norm(sc.dt_grad(x, t)))
        h = _fd_step(x)
        for u in dirs:
            Hp = sc.hessian(x + h * u, t)
            Hm = sc.hessian(x - h * u, t)
            c1_obs = max(c1_obs, la.norm((Hp - Hm) / (2 * h), 2))
        ht = 1e-4
        c2_obs = max(c2_obs, la.norm(
            (sc.hessian(x, t + ht) - sc.hessian(x, max(t - ht, 0.0))) /
            (ht + min(t, ht)), 2))
        c3_obs = max(c3_obs, la.norm(
            (sc.dt_grad(x, t + ht) - sc.dt_grad(x, max(t - ht, 0.0))) /
            (ht + min(t, ht))))

    report = ConstantReport(hess_min, hess_max, c0_obs, c1_obs, c2_obs, c3_obs)
    slack = lambda v: v * (1 + rel_tol) + 1e-8
    if hess_min < c.mu - rel_tol * c.mu - 1e-8:
        report.violations.append(
            f"hessian eigenvalue {hess_min:.6g} below declared mu={c.mu:.6g}")
    if hess_max > slack(c.L):
        report.violations.append(
            f"hessian eigenvalue {hess_max:.6g} above declared L={c.L:.6g}")
    for name, obs, decl in (("C0", c0_obs, c.C0), ("C1", c1_obs, c.C1),
                            ("C2", c2_obs, c.C2), ("C3", c3_obs, c.C3)):
        if obs > slack(decl) + 1e-4:  # FD estimates carry O(h) noise
            report.violations.append(
                f"observed {name}={obs:.6g} exceeds declared {decl:.6g}")
    return report
