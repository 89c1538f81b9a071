"""Nested knot partitions of [0, 1], hat functions and piecewise-linear
evaluation.

A ``Partition`` is a strictly increasing knot vector with endpoints 0 and
1.  Refinement only ever adds knots, so the family produced by repeated
``refine``/``dyadic_refine`` calls is nested.  Functions are represented
by their knot values (``CoefVector``); evaluating the hat-basis expansion
is exact linear interpolation between bracketing knots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DuplicateKnot, OutOfDomain

KNOT_TOL = 1e-12


@dataclass(frozen=True)
class Partition:
    knots: np.ndarray
    level: int = 0

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float).ravel()
        object.__setattr__(self, "knots", knots)
        if knots.size < 2:
            raise ValueError("a partition needs at least the two endpoints")
        if knots[0] != 0.0 or knots[-1] != 1.0:
            raise ValueError("partition must start at 0 and end at 1")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")

    @property
    def n_cells(self) -> int:
        return self.knots.size - 1

    @property
    def mesh(self) -> float:
        """Largest gap between consecutive knots."""
        return float(np.max(np.diff(self.knots)))

    def index_of(self, x: float, tol: float = KNOT_TOL):
        """Index of the knot equal to x within tol, or None."""
        j = int(np.argmin(np.abs(self.knots - x)))
        return j if abs(self.knots[j] - x) <= tol else None


@dataclass(frozen=True)
class CoefVector:
    """Knot values of a piecewise-linear function on a partition."""

    partition: Partition
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        object.__setattr__(self, "values", values)
        if values.size != self.partition.knots.size:
            raise DimensionMismatch(
                f"{values.size} values for {self.partition.knots.size} knots"
            )


def uniform_partition(n_cells: int) -> Partition:
    """Uniform partition {j / n_cells}, level 0."""
    if n_cells < 1:
        raise ValueError("n_cells must be >= 1")
    return Partition(np.linspace(0.0, 1.0, n_cells + 1), level=0)


def refine(p: Partition, extra_knots) -> Partition:
    """Insert interior knots, keeping all existing ones (nesting).

    Raises
    ------
    DuplicateKnot
        If an extra knot coincides with an existing or another extra knot
        within 1e-12.
    """
    extra = np.asarray(sorted(set(float(t) for t in extra_knots)), dtype=float)
    if extra.size and (extra[0] <= 0.0 or extra[-1] >= 1.0):
        raise ValueError("extra knots must lie in the open interval (0, 1)")
    merged = np.sort(np.concatenate([p.knots, extra]))
    if np.any(np.diff(merged) <= KNOT_TOL):
        raise DuplicateKnot("refinement knot within 1e-12 of an existing knot")
    return Partition(merged, level=p.level + 1)


def dyadic_refine(p: Partition) -> Partition:
    """Insert the midpoint of every cell."""
    mids = 0.5 * (p.knots[:-1] + p.knots[1:])
    return refine(p, mids)


def dyadic_ladder(n_cells: int, n_levels: int) -> list[Partition]:
    """Nested ladder starting from the uniform n_cells partition."""
    ladder = [uniform_partition(n_cells)]
    for _ in range(n_levels - 1):
        ladder.append(dyadic_refine(ladder[-1]))
    return ladder


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise OutOfDomain("evaluation point outside [0, 1]")
    return x


def hat_evaluate(p: Partition, j: int, x):
    """The hat function centered at knot j: 1 at t_j, 0 at neighboring
    knots, linear in between, 0 outside its support."""
    if not 0 <= j <= p.n_cells:
        raise IndexError(f"hat index {j} out of range")
    x = _check_domain(x)
    e = np.zeros(p.knots.size)
    e[j] = 1.0
    return np.interp(x, p.knots, e)


def evaluate_pl(c: CoefVector, x):
    """Evaluate the piecewise-linear function with knot values c at x
    (scalar or array); exact linear interpolation between knots."""
    x = _check_domain(x)
    return np.interp(x, c.partition.knots, c.values)


def project(f, p: Partition) -> CoefVector:
    """Knot-value projection: the piecewise-linear interpolant of f on p."""
    try:
        vals = np.asarray(f(p.knots), dtype=float)
        if vals.shape != p.knots.shape:
            raise TypeError
    except TypeError:
        vals = np.array([float(f(t)) for t in p.knots])
    return CoefVector(p, vals)
