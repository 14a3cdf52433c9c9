"""Exception types raised by the solver stack.

Input-validation failures raise plain ``ValueError``; the classes here mark
numerical conditions a caller may want to catch and report rather than fix.
"""

from __future__ import annotations


class KernmolError(Exception):
    """Base class for numerical failures in this package."""


class SingularMatrixError(KernmolError):
    """Factorization met an exactly zero pivot.

    ``pivot_index`` is the (0-based) elimination step at which the zero
    pivot appeared.
    """

    def __init__(self, pivot_index: int):
        self.pivot_index = pivot_index
        super().__init__(f"exactly singular matrix (zero pivot at step {pivot_index})")


class ConditioningError(KernmolError):
    """A system matrix is singular to working precision.

    ``cond_estimate`` is a 1-norm condition number estimate (may be +inf).
    """

    def __init__(self, cond_estimate: float, context: str = ""):
        self.cond_estimate = cond_estimate
        msg = f"matrix singular to working precision (cond ~ {cond_estimate:.3e})"
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


class DegenerateIndicatorError(KernmolError):
    """A diagonal entry of the inverse interpolation matrix is exactly zero,
    so the leave-one-out error rule is undefined for that point."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"zero inverse-diagonal entry at point index {index}")


class BudgetExhaustedError(KernmolError):
    """Refinement would exceed the configured point budget.

    Carries the points flagged for refinement (``flagged_points``) and, once
    the refinement loop re-raises it, the loop iteration (``iteration``).
    """

    def __init__(self, n_current: int, n_requested: int, max_points: int, flagged_points):
        self.n_current = n_current
        self.n_requested = n_requested
        self.max_points = max_points
        self.flagged_points = flagged_points
        self.iteration = None
        super().__init__(
            f"refinement needs {n_requested} points (have {n_current}, cap {max_points})"
        )


class StiffFailureError(KernmolError):
    """Newton iteration failed to converge at the minimum step size."""

    def __init__(self, t: float, step: float, residual_norm: float):
        self.t = t
        self.step = step
        self.residual_norm = residual_norm
        super().__init__(
            f"Newton non-convergence at t={t:.6g} with minimum step {step:.3e} "
            f"(residual norm {residual_norm:.3e})"
        )


class BlowUpError(KernmolError):
    """Non-finite state encountered during integration."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"non-finite solution values at t={t:.6g}")


class AdaptiveSolveError(KernmolError):
    """A time level failed; carries the level index and the report built so far."""

    def __init__(self, level: int, partial_report, cause: Exception):
        self.level = level
        self.partial_report = partial_report
        super().__init__(f"level {level} failed: {cause}")
        self.__cause__ = cause
