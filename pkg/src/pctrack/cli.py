#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Benchmark command line: run experiment configs, tabulate bounds, validate
presets.

Commands
--------
run <config>       : execute every configured method, write per-method
                     trace CSVs, a summary CSV and a gnuplot script.
bounds <config>    : evaluate the applicable asymptotic radii and flag any
                     trace point exceeding its per-step bound.
validate <preset>  : empirical checks of a preset's declared constants and
                     solver properties.
list-presets       : show the registered problem presets.

Config files are flat INI: an [experiment] section (preset, ts, horizon,
seed, out, timing) and one [method.NAME] section per method (strategy,
solver, np, nc, and optional rho, pred_solver, pred_rho).
"""

import argparse
import configparser
import sys
from pathlib import Path

import numpy as np

from . import bounds as bnd
from . import dual as dualmod
from . import operators, runner
from .presets import PRESETS, get_preset, is_constrained
from .prediction import STRATEGY_NAMES
from .problem import validate_constants


def _fmt(v):
    return f"{v:.9e}"


class ConfigError(Exception):
    pass


#%% CONFIG PARSING

class MethodConfig:
    def __init__(self, name, strategy, solver, n_pred, n_corr,
                 rho=None, pred_solver=None, pred_rho=None):
        self.name = name
        self.strategy = strategy
        self.solver = solver
        self.n_pred = n_pred
        self.n_corr = n_corr
        self.rho = rho
        self.pred_solver = pred_solver
        self.pred_rho = pred_rho


class ExperimentConfig:
    def __init__(self, preset, ts, horizon, seed, out, methods, timing=True):
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        if not (0 < ts < 1):
            raise ConfigError(f"ts must lie in (0, 1), got {ts}")
        if horizon <= 0:
            raise ConfigError(f"horizon must be positive, got {horizon}")
        if not methods:
            raise ConfigError("no [method.*] sections found")
        self.preset = preset
        self.ts = ts
        self.horizon = horizon
        self.seed = seed
        self.out = Path(out)
        self.methods = methods
        self.timing = timing


def load_config(path, overrides=None):
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if "experiment" not in parser:
        raise ConfigError(f"{path}: missing [experiment] section")
    exp = parser["experiment"]
    overrides = overrides or {}

    def pick(key, cast, default):
        if key in overrides and overrides[key] is not None:
            return overrides[key]
        try:
            return cast(exp.get(key, default))
        except ValueError as e:
            raise ConfigError(f"{path}: [experiment] {key}: {e}") from None

    methods = []
    for section in parser.sections():
        if not section.startswith("method."):
            continue
        m = parser[section]
        name = section.split(".", 1)[1]
        try:
            strategy = m.get("strategy", "osb")
            if strategy not in STRATEGY_NAMES:
                raise ConfigError(
                    f"{path}: [{section}] unknown strategy {strategy!r}")
            methods.append(MethodConfig(
                name, strategy,
                m.get("solver", "fbs"),
                int(m.get("np", 5)), int(m.get("nc", 5)),
                rho=float(m["rho"]) if "rho" in m else None,
                pred_solver=m.get("pred_solver", None),
                pred_rho=float(m["pred_rho"]) if "pred_rho" in m else None,
            ))
        except ValueError as e:
            raise ConfigError(f"{path}: [{section}]: {e}") from None

    return ExperimentConfig(
        preset=pick("preset", str, "paper_sec7"),
        ts=pick("ts", float, "0.1"),
        horizon=pick("horizon", int, "1000"),
        seed=pick("seed", int, "0"),
        out=pick("out", str, "results"),
        methods=methods,
        timing=exp.get("timing", "on").lower() not in ("off", "0", "false"),
    )


def build_run_config(problem, m, constrained=False):
    c = problem.constants
    if constrained:
        dp = dualmod.build_dual(problem)
        mu, L = dp.mu_bar, dp.L_bar
        method_map = {"gradient": "dual_ascent", "ppa": "mm",
                      "fbs": "dual_fbs", "prs": "admm"}
        solver = method_map.get(m.solver, m.solver)
        pred_solver = method_map.get(m.pred_solver, m.pred_solver)
    else:
        mu, L = c.mu, c.L
        solver, pred_solver = m.solver, m.pred_solver
    rho = operators.default_rho(solver, mu, L) if m.rho is None else m.rho
    corr = operators.make_spec(solver, rho, mu, L)
    pred = None
    if pred_solver is not None:
        pr = (operators.default_rho(pred_solver, mu, L)
              if m.pred_rho is None else m.pred_rho)
        pred = operators.make_spec(pred_solver, pr, mu, L)
    return runner.RunConfig(m.n_pred, m.n_corr, m.strategy, corr,
                            prediction=pred, horizon=None)


#%% ARTIFACT WRITING

def write_trace_csv(path, trace, xs, timing=True):
    n = xs.shape[1]
    header = ("k,t," + ",".join(f"x{i}" for i in range(n))
              + ",err,bound,pred_err,ms")
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for k in range(len(trace)):
            ms = trace.step_ms[k] if timing else 0.0
            row = [str(k), _fmt(trace.t[k])]
            row += [_fmt(v) for v in xs[k]]
            row += [_fmt(trace.err[k]), _fmt(trace.bound[k]),
                    _fmt(trace.pred_err[k]), _fmt(ms)]
            fh.write(",".join(row) + "\n")


def summarize(trace):
    errs = trace.asymptotic_errors()
    tail = len(errs)
    ms = trace.step_ms[len(trace) - tail:]
    return {
        "min": float(np.min(errs)), "mean": float(np.mean(errs)),
        "std": float(np.std(errs)), "max": float(np.max(errs)),
        "mean_ms": float(np.mean(ms)),
    }


def write_summary_csv(path, rows, timing=True):
    with open(path, "w") as fh:
        fh.write("method,min,mean,std,max,mean_ms\n")
        for name, s in rows:
            ms = s["mean_ms"] if timing else 0.0
            fh.write(",".join([name, _fmt(s["min"]), _fmt(s["mean"]),
                               _fmt(s["std"]), _fmt(s["max"]),
                               _fmt(ms)]) + "\n")


def write_plot_script(path, names):
    lines = [
        "set datafile separator ','",
        "set logscale y",
        "set xlabel 'k'",
        "set ylabel 'tracking error'",
        "set key outside",
    ]
    plots = [f"'trace_{n}.csv' using 'k':'err' with lines title '{n}'"
             for n in names]
    lines.append("plot " + ", \\\n     ".join(plots))
    Path(path).write_text("\n".join(lines) + "\n")


#%% COMMANDS

def run_experiment(cfg):
    """Execute every configured method; returns (problem, list of
    (method config, run config, trace))."""
    problem = get_preset(cfg.preset, ts=cfg.ts)
    constrained = is_constrained(problem)
    results = []
    if constrained:
        oracle = dualmod.dual_optimal_trajectory(problem, cfg.horizon)
        for m in cfg.methods:
            rc = build_run_config(problem, m, constrained=True)
            rc.horizon = cfg.horizon
            trace = dualmod.run_dual_prediction_correction(problem, rc,
                                                           w_opt=oracle)
            results.append((m, rc, trace))
    else:
        oracle = runner.optimal_trajectory(problem, cfg.horizon)
        for m in cfg.methods:
            rc = build_run_config(problem, m)
            rc.horizon = cfg.horizon
            trace = runner.run_prediction_correction(problem, rc, x_opt=oracle)
            results.append((m, rc, trace))
    return problem, constrained, results


def cmd_run(cfg):
    cfg.out.mkdir(parents=True, exist_ok=True)
    problem, constrained, results = run_experiment(cfg)
    rows = []
    for m, rc, trace in results:
        if constrained:
            # dual runs report the dual error; primal iterates in x columns
            trace = _dualtrace_view(problem, rc, trace)
        write_trace_csv(cfg.out / f"trace_{m.name}.csv", trace, trace.x,
                        timing=cfg.timing)
        rows.append((m.name, summarize(trace)))
    write_summary_csv(cfg.out / "summary.csv", rows, timing=cfg.timing)
    write_plot_script(cfg.out / "plot.gp", [m.name for m, _, _ in results])
    for name, s in rows:
        print(f"{name}: mean asymptotic error {_fmt(s['mean'])} "
              f"(min {_fmt(s['min'])}, max {_fmt(s['max'])})")
    print(f"artifacts written to {cfg.out}")
    return 0


class _DualTraceView:
    """Adapter giving a dual trace the primal-trace CSV surface."""

    def __init__(self, trace, bound_value):
        self.t = trace.t
        self.x = trace.x
        self.err = trace.dual_err
        self.pred_err = trace.x_err
        self.bound = np.full_like(trace.dual_err, bound_value)
        self.step_ms = trace.step_ms

    def __len__(self):
        return self.t.size

    def asymptotic_errors(self):
        start = len(self) - int(np.ceil(4 * len(self) / 5))
        return self.err[start:]


def _dualtrace_view(problem, rc, trace):
    dp = dualmod.build_dual(problem)
    rep = bnd.bound_dual(rc.n_pred, rc.n_corr, rc.correction, dp.mu_bar,
                         dp.kappa_bar, dp.C0_bar, dp.D0_bar, problem.ts,
                         rc.correction.rho, np.linalg.norm(problem.A, 2),
                         np.linalg.norm(problem.B, 2) if problem.B.size else 0.0,
                         problem.constants.mu, r_pred=rc.prediction)
    return _DualTraceView(trace, rep.radius)


def applicable_bound(problem, rc):
    """The tightest closed-form radius matching a run configuration."""
    c = problem.constants
    rcorr, rpred = rc.correction, rc.prediction
    if rc.n_pred == 0:
        return bnd.bound_correction_only(rc.n_corr, rcorr, c.C0, c.D0,
                                         c.mu, problem.ts)
    if rc.n_corr == 0 and rc.strategy == "osb":
        return bnd.bound_prediction_only(rc.n_pred, rpred, c.C0, c.D0,
                                         c.mu, problem.ts)
    if rc.strategy in ("taylor", "taylor_fd"):
        lin = bnd.bound_taylor(rc.n_pred, rc.n_corr, rcorr, c, problem.ts,
                               r_pred=rpred)
        quad = bnd.bound_taylor_quadratic(rc.n_pred, rc.n_corr, rcorr, c,
                                          problem.ts, r_pred=rpred,
                                          fd=rc.strategy == "taylor_fd")
        return lin if lin.radius <= quad.radius else quad
    if rc.strategy == "extrapolation":
        return bnd.bound_extrapolation(rc.n_pred, rc.n_corr, rcorr, c,
                                       problem.ts, r_pred=rpred)
    # one-step-back with both phases active: generic limsup
    sigma = (c.C0 * problem.ts + c.D0) / c.mu
    radius = bnd.limsup_bound(rcorr, rc.n_pred, rc.n_corr, sigma, sigma,
                              r_pred=rpred)
    rep = bnd.BoundReport("osb_limsup", radius)
    return rep


def cmd_bounds(cfg):
    cfg.out.mkdir(parents=True, exist_ok=True)
    problem, constrained, results = run_experiment(cfg)
    flagged = 0
    lines = []
    for m, rc, trace in results:
        if constrained:
            view = _dualtrace_view(problem, rc, trace)
            radius = view.bound[0]
            tail = view.asymptotic_errors()
            over = int(np.sum(tail > radius)) if np.isfinite(radius) else 0
            lines.append((m.name, "dual", radius, float(np.mean(tail)), over))
            flagged += over
        else:
            rep = applicable_bound(problem, rc)
            check = runner.check_recursion_bound(trace, problem, rc)
            tail = trace.asymptotic_errors()
            over = len(check.violations)
            if np.isfinite(rep.radius) and np.mean(tail) > rep.radius:
                over += 1
            lines.append((m.name, rep.method, rep.radius,
                          float(np.mean(tail)), over))
            flagged += over
    with open(cfg.out / "bounds.csv", "w") as fh:
        fh.write("method,bound_kind,radius,asymptotic_mean,flags\n")
        for name, kind, radius, mean, over in lines:
            fh.write(f"{name},{kind},{_fmt(radius)},{_fmt(mean)},{over}\n")
    for name, kind, radius, mean, over in lines:
        status = "ok" if over == 0 else f"{over} FLAGS"
        print(f"{name}: {kind} radius {_fmt(radius)}, "
              f"asymptotic mean {_fmt(mean)} [{status}]")
    return 0 if flagged == 0 else 1


def cmd_validate(preset_name, seed=0, ts=0.1):
    problem = get_preset(preset_name, ts=ts)
    rng = np.random.default_rng(seed)
    failures = []

    if is_constrained(problem):
        dp = dualmod.build_dual(problem)
        # dual derivatives against finite differences of the dual value
        for w0, t in [(rng.uniform(-1, 1, problem.p), rng.uniform(0, 10))
                      for _ in range(5)]:
            g, H, dtg = dp.derivatives(w0, t)
            h = 1e-5
            for i in range(problem.p):
                e = np.zeros(problem.p)
                e[i] = h
                fd = (dp.value(w0 + e, t) - dp.value(w0 - e, t)) / (2 * h)
                if abs(fd - g[i]) > 1e-4 * max(1.0, abs(g[i])):
                    failures.append(
                        f"dual gradient component {i} mismatch at t={t:.3f}")
            # time derivative of the gradient via FD of the gradient
            gp, _, _ = dp.derivatives(w0, t + h)
            gm, _, _ = dp.derivatives(w0, t - h)
            fdg = (gp - gm) / (2 * h)
            if np.linalg.norm(fdg - dtg) > 1e-4 * max(1.0, np.linalg.norm(dtg)):
                failures.append(f"dual time derivative mismatch at t={t:.3f}")
        print(f"dual oracle checks: {5 * problem.p + 5} probes")
    else:
        grid = [(rng.uniform(-2, 2, problem.dim), rng.uniform(0, 100))
                for _ in range(20)]
        report = validate_constants(problem, grid, rng=rng)
        failures.extend(report.violations)
        # solver sanity: fixed point optimality on a sampled instance
        sk = problem.sample(0)
        c = problem.constants
        spec = operators.make_spec("fbs", operators.default_rho(
            "fbs", c.mu, c.L), c.mu, c.L)
        st = operators.anchor_state(sk, spec, np.zeros(problem.dim))
        st = operators.run_solver(sk, spec, st, 2000)
        resid = sk.optimality_residual(st.x, rho=spec.rho)
        if resid > 1e-7:
            failures.append(f"fixed point residual {resid:.3g} too large")

    if failures:
        for f in failures:
            print(f"FAIL: {f}")
        return 1
    print(f"{preset_name}: all checks passed")
    return 0


def cmd_list_presets():
    for name in sorted(PRESETS):
        kind = ("constrained" if is_constrained(get_preset(name))
                else "composite")
        print(f"{name}  ({kind})")
    return 0


#%% ENTRY POINT

def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="pctrack",
        description="prediction-correction benchmarks for time-varying "
                    "convex optimization")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--ts", type=float, default=None,
                        help="sampling period")
    common.add_argument("--horizon", type=int, default=None,
                        help="number of sampled instants")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common]).add_argument("config")
    sub.add_parser("bounds", parents=[common]).add_argument("config")
    sub.add_parser("validate", parents=[common]).add_argument("preset")
    sub.add_parser("list-presets", parents=[common])
    args = ap.parse_args(argv)

    try:
        if args.command == "list-presets":
            return cmd_list_presets()
        if args.command == "validate":
            return cmd_validate(args.preset,
                                seed=args.seed if args.seed is not None else 0,
                                ts=args.ts if args.ts is not None else 0.1)
        overrides = {"ts": args.ts, "horizon": args.horizon,
                     "seed": args.seed, "out": args.out}
        cfg = load_config(args.config, overrides)
        if args.command == "run":
            return cmd_run(cfg)
        return cmd_bounds(cfg)
    except (ConfigError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
