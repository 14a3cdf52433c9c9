"""Multiquadric radial kernel with per-center shape parameters.

The basis attached to center ``x_j`` is ``k_j(x) = sqrt(1 + eps_j^2 (x - x_j)^2)``
where ``eps_j`` is derived from the local spacing of the center set: starting
from a base value ``eps0``, each center uses ``eps0 * min(1/gap_left, 1/gap_right)``
(one-sided at the ends).  Because the shape parameter belongs to the center,
collocation matrices built here are generally *not* symmetric on non-uniform
grids, and downstream linear algebra must not assume symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class KernelFamily(Enum):
    """Supported radial kernel families (extension seam; one member today)."""

    MULTIQUADRIC = "multiquadric"


@dataclass(frozen=True)
class KernelConfig:
    """Kernel family plus the base shape parameter ``eps0 > 0``."""

    eps0: float
    family: KernelFamily = KernelFamily.MULTIQUADRIC

    def __post_init__(self):
        if not (self.eps0 > 0):
            raise ValueError(f"eps0 must be positive, got {self.eps0}")
        if self.family is not KernelFamily.MULTIQUADRIC:
            raise ValueError(f"unsupported kernel family: {self.family}")


def variable_shape(points, eps0: float) -> np.ndarray:
    """Per-center shape parameters from local spacing.

    ``eps[0] = eps0/gap[0]``, ``eps[-1] = eps0/gap[-1]`` and interior centers
    use ``eps0 * min(1/gap_left, 1/gap_right)``.  On a uniform grid of spacing
    ``h`` every entry is ``eps0/h``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size < 2:
        raise ValueError("variable_shape needs at least 2 points")
    if not (eps0 > 0):
        raise ValueError(f"eps0 must be positive, got {eps0}")
    gaps = np.diff(pts)
    if np.any(gaps <= 0):
        raise ValueError("points must be strictly increasing (no duplicates)")
    inv = 1.0 / gaps
    eps = np.empty(pts.size)
    eps[0] = eps0 * inv[0]
    eps[-1] = eps0 * inv[-1]
    eps[1:-1] = eps0 * np.minimum(inv[:-1], inv[1:])
    return eps


def kernel_value(eps_j, x, xj):
    """Multiquadric value ``sqrt(1 + eps_j^2 (x - xj)^2)``; always >= 1."""
    r = np.asarray(x, dtype=float) - xj
    return np.sqrt(1.0 + (eps_j * r) ** 2)


def kernel_dx(eps_j, x, xj):
    """d/dx of the multiquadric: ``eps_j^2 (x - xj) / sqrt(1 + eps_j^2 r^2)``."""
    r = np.asarray(x, dtype=float) - xj
    return eps_j**2 * r / np.sqrt(1.0 + (eps_j * r) ** 2)


def kernel_dxx(eps_j, x, xj):
    """d2/dx2 of the multiquadric: ``eps_j^2 (1 + eps_j^2 r^2)^(-3/2)``."""
    r = np.asarray(x, dtype=float) - xj
    return eps_j**2 * (1.0 + (eps_j * r) ** 2) ** (-1.5)


_KERNEL_DERIVS = (kernel_value, kernel_dx, kernel_dxx)


def cross_matrix(x_eval, centers, shapes, deriv: int = 0) -> np.ndarray:
    """Rectangular kernel matrix ``M[i, j] = K^(deriv)(eps_j; x_eval[i], centers[j])``.

    ``deriv`` is the x-derivative order: 0, 1 or 2.
    """
    x_eval = np.atleast_1d(np.asarray(x_eval, dtype=float))
    centers = np.asarray(centers, dtype=float)
    shapes = np.asarray(shapes, dtype=float)
    if shapes.shape != centers.shape:
        raise ValueError(
            f"shape vector length {shapes.size} != number of centers {centers.size}"
        )
    if deriv not in (0, 1, 2):
        raise ValueError(f"deriv must be 0, 1 or 2, got {deriv}")
    # eps is attached to the center, i.e. constant along each column
    return _KERNEL_DERIVS[deriv](shapes[None, :], x_eval[:, None], centers[None, :])


def build_matrix(points, shapes, deriv: int = 0) -> np.ndarray:
    """Square collocation matrix over ``points`` (evaluation sites == centers)."""
    points = np.asarray(points, dtype=float)
    return cross_matrix(points, points, shapes, deriv)
