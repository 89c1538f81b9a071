"""Linear-inequality encodings of the three convex families.

Boundedness, monotonicity and convexity are each exact at the knot level
for piecewise-linear functions: a hat-basis expansion lies in the family
over all of [0, 1] iff its knot values satisfy the corresponding finite
system.  Bounds become box rows, monotonicity first differences, and
convexity second divided differences (correct on non-uniform knots).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .partition import CoefVector, Partition, project

BOUNDS = "bounds"
MONOTONE = "monotone"
CONVEX = "convex"
NONE = "none"

DEFAULT_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class ConstraintSpec:
    """One convex family: bounds(a, b), monotone, convex or none."""

    family: str
    lower: float = -np.inf
    upper: float = np.inf

    def __post_init__(self):
        if self.family not in (BOUNDS, MONOTONE, CONVEX, NONE):
            raise ValueError(f"unknown constraint family {self.family!r}")
        if self.family == BOUNDS and not self.lower < self.upper:
            raise ValueError("bounds require lower < upper")

    @staticmethod
    def bounds(lower=-np.inf, upper=np.inf) -> "ConstraintSpec":
        return ConstraintSpec(BOUNDS, float(lower), float(upper))

    @staticmethod
    def monotone() -> "ConstraintSpec":
        return ConstraintSpec(MONOTONE)

    @staticmethod
    def convex() -> "ConstraintSpec":
        return ConstraintSpec(CONVEX)

    @staticmethod
    def none() -> "ConstraintSpec":
        return ConstraintSpec(NONE)

    def holds_on_grid(self, f, grid) -> bool:
        """Check membership of a function on a dense grid (caller-side
        verification, used by check_h2 preconditions)."""
        y = np.asarray([f(x) for x in np.asarray(grid, dtype=float)])
        if self.family == BOUNDS:
            return bool(np.all(y >= self.lower) and np.all(y <= self.upper))
        if self.family == MONOTONE:
            return bool(np.all(np.diff(y) >= 0))
        if self.family == CONVEX:
            g = np.asarray(grid, dtype=float)
            slopes = np.diff(y) / np.diff(g)
            return bool(np.all(np.diff(slopes) >= -1e-10))
        return True


@dataclass(frozen=True)
class LinearInequalitySystem:
    """Rows lower <= G c <= upper on a coefficient vector.

    Rows where both sides are infinite are never stored.
    """

    matrix: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        lo = np.asarray(self.lower, dtype=float).ravel()
        hi = np.asarray(self.upper, dtype=float).ravel()
        if G.shape[0] != lo.size or G.shape[0] != hi.size:
            raise DimensionMismatch("row count mismatch in inequality system")
        object.__setattr__(self, "matrix", G)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.matrix.shape[1] if self.n_rows else 0


def empty_system(n: int) -> LinearInequalitySystem:
    return LinearInequalitySystem(np.zeros((0, n)), np.zeros(0), np.zeros(0))


def encode(spec: ConstraintSpec, p: Partition) -> LinearInequalitySystem:
    """Knot-level inequality system of one family on a partition."""
    n = p.knots.size
    if spec.family == NONE:
        return empty_system(n)
    if spec.family == BOUNDS:
        if not np.isfinite(spec.lower) and not np.isfinite(spec.upper):
            return empty_system(n)
        G = np.eye(n)
        lo = np.full(n, spec.lower)
        hi = np.full(n, spec.upper)
        return LinearInequalitySystem(G, lo, hi)
    if spec.family == MONOTONE:
        G = np.zeros((n - 1, n))
        idx = np.arange(n - 1)
        G[idx, idx] = -1.0
        G[idx, idx + 1] = 1.0
        return LinearInequalitySystem(G, np.zeros(n - 1), np.full(n - 1, np.inf))
    # convexity: difference of consecutive divided differences >= 0
    t = p.knots
    m = n - 2
    G = np.zeros((m, n))
    for j in range(m):
        h0 = t[j + 1] - t[j]
        h1 = t[j + 2] - t[j + 1]
        G[j, j] = 1.0 / h0
        G[j, j + 1] = -1.0 / h0 - 1.0 / h1
        G[j, j + 2] = 1.0 / h1
    return LinearInequalitySystem(G, np.zeros(m), np.full(m, np.inf))


def combine(systems) -> LinearInequalitySystem:
    """Concatenate systems (intersection of the convex sets)."""
    systems = [s for s in systems if s.n_rows]
    if not systems:
        raise ValueError("combine needs at least one non-empty system")
    return LinearInequalitySystem(
        np.vstack([s.matrix for s in systems]),
        np.concatenate([s.lower for s in systems]),
        np.concatenate([s.upper for s in systems]),
    )


def encode_all(specs, p: Partition) -> LinearInequalitySystem:
    """Encode a list of constraint specs on one partition."""
    out = [encode(s, p) for s in specs]
    out = [s for s in out if s.n_rows]
    if not out:
        return empty_system(p.knots.size)
    return combine(out)


def is_feasible(sys: LinearInequalitySystem, c: CoefVector, tol: float = DEFAULT_FEAS_TOL) -> bool:
    """True iff every row residual is within tol of its bounds."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    if sys.n_rows == 0:
        return True
    v = c.values if isinstance(c, CoefVector) else np.asarray(c, dtype=float)
    if sys.matrix.shape[1] != v.size:
        raise DimensionMismatch("coefficient length does not match system")
    r = sys.matrix @ v
    return bool(np.all(r >= sys.lower - tol) and np.all(r <= sys.upper + tol))


@dataclass
class H2Report:
    """Result of the projection-invariance check pi_N(C) in C."""

    violations: list = field(default_factory=list)
    n_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def check_h2(spec: ConstraintSpec, f_samples, ladder, tol: float = 1e-12) -> H2Report:
    """Project each sample function onto each level and test knot-level
    feasibility; lists (function index, level) pairs that fail."""
    report = H2Report()
    for fi, f in enumerate(f_samples):
        for li, p in enumerate(ladder):
            c = project(f, p)
            report.n_checked += 1
            if not is_feasible(encode(spec, p), c, tol=tol):
                report.violations.append((fi, li))
    return report
