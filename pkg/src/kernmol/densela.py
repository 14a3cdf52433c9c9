"""Dense linear algebra used by the collocation solver.

Thin wrappers over LAPACK (via scipy/numpy) that pin down the error behavior
the rest of the package relies on: exact singularity raises, near-singularity
is detectable cheaply from the factors, and the 2-norm condition number is an
observable (it never raises; singular matrices map to +inf).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import get_lapack_funcs

from .errors import SingularMatrixError


@dataclass(frozen=True)
class LuFactors:
    """Packed LU factors with partial-pivot indices, plus the 1-norm of A
    (needed for cheap condition estimates)."""

    lu: np.ndarray
    piv: np.ndarray
    anorm1: float

    @property
    def n(self) -> int:
        return self.lu.shape[0]


def lu_factor(a) -> LuFactors:
    """LU-factorize a square matrix with partial pivoting.

    Raises ``SingularMatrixError`` (with the pivot index) if elimination hits
    an exactly zero pivot, and ``ValueError`` for non-square or non-finite
    input.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix has non-finite entries")
    anorm1 = float(np.abs(a).sum(axis=0).max()) if a.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # scipy warns on exact zero pivots
        lu, piv = sla.lu_factor(a, check_finite=False)
    diag = np.diag(lu)
    zeros = np.flatnonzero(diag == 0.0)
    if zeros.size:
        raise SingularMatrixError(int(zeros[0]))
    return LuFactors(lu=lu, piv=piv, anorm1=anorm1)


def lu_solve(f: LuFactors, b) -> np.ndarray:
    """Solve ``A x = b`` from the factors; ``b`` may be a vector or matrix."""
    b = np.asarray(b, dtype=float)
    if b.shape[0] != f.n:
        raise ValueError(f"rhs length {b.shape[0]} != matrix size {f.n}")
    return sla.lu_solve((f.lu, f.piv), b, check_finite=False)


def rcond_estimate(f: LuFactors) -> float:
    """Reciprocal 1-norm condition estimate from the factors (LAPACK gecon)."""
    (gecon,) = get_lapack_funcs(("gecon",), (f.lu,))
    rcond, info = gecon(f.lu, f.anorm1, norm="1")
    if info != 0:
        raise ValueError(f"gecon failed with info={info}")
    return float(rcond)


def inverse_diagonal(f: LuFactors) -> np.ndarray:
    """Diagonal of ``A^{-1}``, via n triangular solves against unit vectors."""
    return np.diag(lu_solve(f, np.eye(f.n)))


def cond2(a) -> float:
    """2-norm condition number sigma_max/sigma_min; +inf when sigma_min
    underflows or vanishes."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    s = np.linalg.svd(a, compute_uv=False)
    smin = s[-1]
    if smin == 0.0 or not np.isfinite(smin):
        return np.inf
    return float(s[0] / smin)
