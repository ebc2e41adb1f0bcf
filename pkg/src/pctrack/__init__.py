#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
pctrack: prediction-correction solvers for time-varying convex optimization.

The package tracks the optimizer trajectory of sampled time-varying
composite problems by alternating a prediction phase (solver steps on a
forecast of the next cost) with a correction phase (solver steps on the
revealed cost), both primal and dual, and ships the matching closed-form
convergence bounds plus a benchmark command line.
"""

from .problem import (SmoothCost, NonsmoothCost, RegularityConstants,
                      TimeVaryingProblem, SampledProblem, FrozenSmooth,
                      FrozenNonsmooth, QuadraticSmooth, ProxSolveError,
                      finite_diff_dt_grad, validate_constants, soft_threshold)
from .operators import (SolverSpec, SolverState, make_spec, default_rho,
                        contraction_rates, gradient_step, ppa_step, fbs_step,
                        prs_step, run_solver, anchor_state, readout)
from .prediction import (Surrogate, PredictionStrategy, one_step_back,
                         taylor_surrogate, extrapolation_surrogate,
                         interpolation_coefficients, prediction_error_bound)
from .bounds import (RateTriple, BoundReport, zeta, xi, effective_triple,
                     bound_correction_only, bound_prediction_only,
                     bound_taylor, bound_taylor_quadratic,
                     bound_extrapolation, bound_dual, regime_table,
                     iterated_bound, limsup_bound)
from .runner import (RunConfig, RunTrace, run_prediction_correction,
                     optimal_trajectory, check_recursion_bound,
                     default_config)
from .dual import (ConstrainedProblem, DualProblem, DualState, build_dual,
                   dual_derivatives, dual_ascent_step, mm_step,
                   dual_fbs_step, admm_step, dual_taylor_surrogate,
                   run_dual_prediction_correction, dual_optimal_trajectory,
                   primal_recovery_factors)
from .presets import PRESETS, get_preset

__version__ = "0.1.0"
