"""Exception types shared across the package."""


class ConstrainedGPError(Exception):
    """Base class for all package errors."""


class ConditioningFailure(ConstrainedGPError):
    """Cholesky factorization failed even at the jitter cap.

    Usually means the knots are too dense for the kernel length scale at
    working precision.
    """


class DuplicateKnot(ConstrainedGPError):
    """A refinement knot coincides with an existing knot within tolerance."""


class OutOfDomain(ConstrainedGPError):
    """Evaluation point outside [0, 1]."""


class DimensionMismatch(ConstrainedGPError):
    """Vector/matrix dimensions are inconsistent."""


class NotPositiveDefinite(ConstrainedGPError):
    """A matrix required to be SPD is not."""


class DataCollision(ConstrainedGPError):
    """Two data points snap to the same knot."""


class InfeasiblePolytope(ConstrainedGPError):
    """The inequality polytope (after fixing the data coordinates) is empty."""


class StallDetected(ConstrainedGPError):
    """Gibbs update found an empty truncation interval."""


class EmptyBatch(ConstrainedGPError):
    """A sample batch with no draws was passed to an aggregation routine."""


class ConfigError(ConstrainedGPError):
    """Experiment configuration is malformed."""
