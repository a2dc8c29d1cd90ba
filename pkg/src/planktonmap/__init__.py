"""Discrete phytoplankton-zooplankton map with Holling type II and III grazing.

Fixed-point stability, Neimark-Sacker coefficients, feedback control of
chaos, invariant sets, and orbit/Lyapunov sweeps.
"""
__version__ = "0.1.0"

from .model import (
    Jacobian2x2,
    ModelParams,
    PlanktonState,
    boundary_fixed_points,
    jacobian,
    nonnegativity_condition,
    positive_fixed_point,
    step,
)
from .stability import (
    FixedPointReport,
    NoCriticalParameter,
    StabilityClass,
    classify_E0,
    classify_E1,
    classify_positive,
    critical_gamma,
    jury_classify,
    solve_critical_gamma,
)
from .neimark_sacker import NSDirection, NSReport, lyapunov_quantity, transversality
from .control import ControlGains, control_triangle, controlled_step, is_stable
from .invariant import SetKind, converges_to_E1, make_invariant_set, psi_min
from .orbit import (
    SweepConfig,
    bifurcation_diagram,
    max_lyapunov,
    mle_curve,
    simulate,
    stability_region,
)
