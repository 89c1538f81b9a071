"""Finite-dimensional RKHS machinery.

The hat-basis space on a partition carries the norm
``|h|^2 = c^T Gamma^{-1} c`` where c holds the knot values and Gamma is
the kernel Gram matrix at the knots.  The norm sequence over a nested
knot ladder is non-decreasing and converges to the ambient RKHS norm for
functions in the RKHS; it diverges outside it.  That diagnostic, the
unconstrained kriging mean, and the two supporting matrix facts (the
block-matrix inequality and the N-independent sup-norm bound) live here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .errors import DimensionMismatch, NotPositiveDefinite
from .kernels import GramMatrix, Kernel, gram
from .partition import CoefVector, Partition, project


@dataclass(frozen=True)
class DesignData:
    """Noise-free observations y_i at distinct points x_i in [0, 1]."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        vals = np.asarray(self.values, dtype=float).ravel()
        if pts.size == 0:
            raise ValueError("need at least one data point")
        if pts.size != vals.size:
            raise DimensionMismatch("points and values differ in length")
        if np.unique(pts).size != pts.size:
            raise ValueError("data points must be distinct")
        if np.any(pts < 0) or np.any(pts > 1):
            raise ValueError("data points must lie in [0, 1]")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class RkhsNormSeq:
    """Squared norms of the knot-value projections along a nested ladder."""

    partitions: tuple
    values: np.ndarray

    def is_nondecreasing(self, rtol: float = 1e-8) -> bool:
        v = self.values
        scale = np.maximum(np.abs(v[:-1]), 1.0)
        return bool(np.all(np.diff(v) >= -rtol * scale))


def hn_norm_sq(c: CoefVector, g: GramMatrix) -> float:
    """c^T Gamma^{-1} c through the cached Cholesky factor."""
    v = c.values if isinstance(c, CoefVector) else np.asarray(c, dtype=float)
    if v.size != g.n:
        raise DimensionMismatch(f"{v.size} coefficients for a {g.n}x{g.n} Gram matrix")
    w = g.half_solve(v)
    return float(w @ w)


def norm_ladder(f, ladder, kernel: Kernel) -> RkhsNormSeq:
    """Norm sequence m_N(f) of the projections of f on a nested ladder."""
    values = []
    for p in ladder:
        g = gram(kernel, p)
        values.append(hn_norm_sq(project(f, p), g))
    return RkhsNormSeq(partitions=tuple(ladder), values=np.asarray(values))


def kriging_mean(data: DesignData, kernel: Kernel, x_query) -> np.ndarray:
    """Unconstrained posterior mean k(x)^T K^{-1} y at the query points."""
    g = gram(kernel, data.points)
    alpha = g.solve(data.values)
    kx = kernel.pairwise(np.atleast_1d(np.asarray(x_query, dtype=float)), data.points)
    return kx @ alpha


def check_block_lemma(B: np.ndarray, y: np.ndarray):
    """Quadratic forms (y^T B^{-1} y, x^T A^{-1} x) where A is the leading
    principal block of B and x the leading entries of y.

    The first is never smaller than the second when B is SPD; the caller
    asserts that.  Raises NotPositiveDefinite if B (or A) fails Cholesky.
    """
    B = np.asarray(B, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 2:
        raise DimensionMismatch("B must be square with size >= 2")
    if y.size != B.shape[0]:
        raise DimensionMismatch("y length must match B")
    if not np.allclose(B, B.T, rtol=0, atol=1e-12 * np.max(np.abs(B))):
        raise NotPositiveDefinite("B is not symmetric")
    try:
        LB = cholesky(B, lower=True)
        LA = cholesky(B[:-1, :-1], lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("B is not positive definite") from exc
    wb = solve_triangular(LB, y, lower=True)
    wa = solve_triangular(LA, y[:-1], lower=True)
    return float(wb @ wb), float(wa @ wa)


def uniform_bound_constant(kernel: Kernel) -> float:
    """The N-independent constant bounding the sup norm by the hat-space
    norm; equals sigma for the stationary families implemented here."""
    return kernel.sigma
