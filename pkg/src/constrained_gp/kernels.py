"""Covariance functions and Gram-matrix assembly.

Two stationary families are provided: the squared-exponential kernel

    K(x, x') = sigma^2 exp(-(x - x')^2 / (2 theta^2))

and Matern 5/2.  Gram matrices carry a cached Cholesky factor; an
escalating diagonal jitter (starting at 1e-10 * sigma^2, growing by
factors of 10, capped at 1e-6 * sigma^2) is applied until the
factorization succeeds.  The jitter actually applied is recorded on the
result, never silent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from .errors import ConditioningFailure

SQUARED_EXPONENTIAL = "squared_exponential"
MATERN52 = "matern52"
_FAMILIES = (SQUARED_EXPONENTIAL, MATERN52)

JITTER_INIT_FACTOR = 1e-10
JITTER_GROWTH = 10.0
JITTER_CAP_FACTOR = 1e-6


@dataclass(frozen=True)
class Kernel:
    """Stationary covariance function with amplitude ``sigma`` and length
    scale ``theta`` (both strictly positive)."""

    family: str
    sigma: float
    theta: float

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if not (self.sigma > 0 and np.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")
        if not (self.theta > 0 and np.isfinite(self.theta)):
            raise ValueError("theta must be positive and finite")

    def __call__(self, x, xp):
        """Evaluate K(x, x') with broadcasting."""
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        r = np.abs(x - xp) / self.theta
        if self.family == SQUARED_EXPONENTIAL:
            return self.sigma**2 * np.exp(-0.5 * r**2)
        s = np.sqrt(5.0) * r
        return self.sigma**2 * (1.0 + s + s**2 / 3.0) * np.exp(-s)

    def pairwise(self, x, xp=None):
        """Matrix of kernel values K(x_i, xp_j)."""
        x = np.asarray(x, dtype=float)
        if xp is None:
            xp = x
        xp = np.asarray(xp, dtype=float)
        return self(x[:, None], xp[None, :])


def evaluate(kernel: Kernel, x: float, xp: float) -> float:
    """Scalar kernel evaluation, K(x, x')."""
    return float(kernel(x, xp))


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric kernel matrix with cached lower Cholesky factor.

    ``values`` holds the raw kernel evaluations; the factor is of
    ``values + jitter_applied * I``.  All inverse applications go through
    the factor (triangular solves), never an explicit inverse.
    """

    values: np.ndarray
    jitter_applied: float
    cholesky_factor: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def regularized(self) -> np.ndarray:
        """values + jitter * I, the matrix that was actually factorized."""
        return self.values + self.jitter_applied * np.eye(self.n)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """(values + jitter I)^{-1} b via two triangular solves."""
        return cho_solve((self.cholesky_factor, True), np.asarray(b, dtype=float))

    def half_solve(self, b: np.ndarray) -> np.ndarray:
        """L^{-1} b, so that ||half_solve(c)||^2 = c^T Gamma^{-1} c."""
        return solve_triangular(self.cholesky_factor, np.asarray(b, dtype=float), lower=True)


def chol_with_jitter(matrix: np.ndarray, scale: float):
    """Lower Cholesky factor of ``matrix + jitter I`` under the escalating
    jitter policy (start 1e-10 * scale, grow x10, cap 1e-6 * scale).

    Returns (factor, jitter_applied).  Raises ConditioningFailure at the
    cap.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    jitter = 0.0
    while True:
        try:
            factor = cholesky(matrix + jitter * np.eye(n), lower=True)
            return factor, jitter
        except np.linalg.LinAlgError:
            pass
        if jitter == 0.0:
            jitter = JITTER_INIT_FACTOR * scale
        elif jitter >= JITTER_CAP_FACTOR * scale:
            raise ConditioningFailure(
                f"Cholesky failed at jitter cap {JITTER_CAP_FACTOR * scale:.3e} "
                f"for a {n}x{n} matrix"
            )
        else:
            jitter = min(jitter * JITTER_GROWTH, JITTER_CAP_FACTOR * scale)


def gram(kernel: Kernel, points) -> GramMatrix:
    """Assemble the Gram matrix of ``points`` (a Partition or an array of
    distinct reals) and factorize it, escalating jitter as needed.

    Raises
    ------
    ConditioningFailure
        If the factorization still fails at the jitter cap.
    """
    pts = np.asarray(getattr(points, "knots", points), dtype=float).ravel()
    values = kernel.pairwise(pts)
    values = 0.5 * (values + values.T)
    factor, jitter = chol_with_jitter(values, kernel.sigma**2)
    return GramMatrix(values=values, jitter_applied=jitter, cholesky_factor=factor)
