"""Constrained Gaussian-process interpolation.

Computes the mode (MAP) of a Gaussian process conditioned on noise-free
interpolation data and linear inequality constraints (bounds,
monotonicity, convexity) through a hat-function finite-dimensional
approximation, and contrasts it with the truncated-Gaussian posterior
mean by sampling.
"""

__version__ = "0.1.0"

from .constraints import (
    ConstraintSpec,
    LinearInequalitySystem,
    check_h2,
    combine,
    encode,
    encode_all,
    is_feasible,
)
from .errors import (
    ConditioningFailure,
    ConfigError,
    ConstrainedGPError,
    DataCollision,
    DimensionMismatch,
    DuplicateKnot,
    EmptyBatch,
    InfeasiblePolytope,
    NotPositiveDefinite,
    OutOfDomain,
    StallDetected,
)
from .kernels import GramMatrix, Kernel, evaluate, gram
from .partition import (
    CoefVector,
    Partition,
    dyadic_ladder,
    dyadic_refine,
    evaluate_pl,
    hat_evaluate,
    project,
    refine,
    uniform_partition,
)
from .qp import (
    ConvergenceReport,
    MapSolution,
    QpProblem,
    build_problem,
    convergence_ladder,
    solve_map,
)
from .rkhs import (
    DesignData,
    RkhsNormSeq,
    check_block_lemma,
    hn_norm_sq,
    kriging_mean,
    norm_ladder,
    uniform_bound_constant,
)
from .sampler import (
    ConditionalGaussian,
    PosteriorSummary,
    SampleBatch,
    condition_on_data,
    posterior_summary,
    sample,
)

__all__ = [name for name in dir() if not name.startswith("_")]
