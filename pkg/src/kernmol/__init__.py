"""Adaptive kernel-collocation method-of-lines solver for 1D time-dependent BVPs.

Spatial discretization uses multiquadric kernel collocation with per-center
shape parameters; time stepping uses implicit BDF on the resulting
differential-algebraic system; and the collocation set is re-adapted at every
time level from a leave-one-out cross-validation error indicator with a
two-point insertion rule.
"""

from .dae import IntegratorConfig, StepResult, consistent_initialize, integrate
from .driver import AdaptiveConfig, LevelRecord, RunReport, rmse_at, solve_adaptive
from .errors import (AdaptiveSolveError, BlowUpError, BudgetExhaustedError,
                     ConditioningError, DegenerateIndicatorError, KernmolError,
                     SingularMatrixError, StiffFailureError)
from .interp import KernelInterpolator
from .kernel import KernelConfig, KernelFamily, build_matrix, variable_shape
from .mol import DirichletBC, ProblemDef, SemiDiscrete, assemble
from .problems import allen_cahn, burgers_moving_front, burgers_shock
from .refine import (PointSet, RefineConfig, RefineResult, refine_loop,
                     refine_once, separation_distance)

__all__ = [
    "AdaptiveConfig", "AdaptiveSolveError", "BlowUpError", "BudgetExhaustedError",
    "ConditioningError", "DegenerateIndicatorError", "DirichletBC",
    "IntegratorConfig", "KernelConfig", "KernelFamily", "KernelInterpolator",
    "KernmolError", "LevelRecord", "PointSet", "ProblemDef", "RefineConfig",
    "RefineResult", "RunReport", "SemiDiscrete", "SingularMatrixError",
    "StepResult", "StiffFailureError", "allen_cahn", "assemble", "build_matrix",
    "burgers_moving_front", "burgers_shock", "consistent_initialize", "integrate",
    "refine_loop", "refine_once", "rmse_at", "separation_distance",
    "solve_adaptive", "variable_shape",
]

__version__ = "0.1.0"
