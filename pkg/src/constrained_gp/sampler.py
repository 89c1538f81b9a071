"""Sampling from the constrained posterior of the knot-value vector.

The posterior given interpolation data and shape constraints is a
multivariate normal restricted to a polytope: the data knots are pinned
exactly, the free knots follow the Gaussian conditional, and the
inequality rows truncate it.  Rejection sampling is used first; when a
1000-proposal pilot accepts less than 1%, a coordinate-wise Gibbs sampler
over the truncated Gaussian takes over (burn-in 1000, thinning 10).  All
three constraint families touch at most three coordinates per row, so
each Gibbs update reduces to a one-dimensional truncated normal on an
interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve
from scipy.optimize import linprog
from scipy.special import ndtr, ndtri

from .constraints import LinearInequalitySystem, is_feasible
from .errors import EmptyBatch, InfeasiblePolytope, StallDetected
from .kernels import chol_with_jitter
from .partition import CoefVector, evaluate_pl
from .qp import QpProblem, _one_sided_rows

REJECTION = "rejection"
GIBBS = "gibbs"

PILOT_SIZE = 1000
PILOT_THRESHOLD = 0.01
GIBBS_BURN_IN = 1000
GIBBS_THINNING = 10
FEAS_TOL = 1e-9


@dataclass(frozen=True)
class ConditionalGaussian:
    """Gaussian law of the free knot values given the data equalities."""

    mean: np.ndarray
    covariance: np.ndarray
    free_indices: np.ndarray
    fixed_indices: np.ndarray
    fixed_values: np.ndarray
    partition: object
    jitter: float

    @property
    def dim(self) -> int:
        return self.mean.size

    def assemble(self, free_values: np.ndarray) -> np.ndarray:
        """Full knot-value vector from free coordinates."""
        full = np.empty(self.free_indices.size + self.fixed_indices.size)
        full[self.free_indices] = free_values
        full[self.fixed_indices] = self.fixed_values
        return full


@dataclass
class SampleBatch:
    draws: list
    n_requested: int
    n_accepted: int
    n_proposed: int
    method: str
    rng_seed: int
    acceptance_rate: float
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PosteriorSummary:
    grid: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    mcse: np.ndarray
    q025: np.ndarray
    q975: np.ndarray


def condition_on_data(qp: QpProblem) -> ConditionalGaussian:
    """Condition the knot-value Gaussian on the equality block.

    The mean at a free knot equals the kriging mean there; the covariance
    is the Schur complement, jittered under the shared policy before its
    factorization is needed.
    """
    n = qp.n
    fixed = np.asarray(qp.eq_indices, dtype=int)
    free = np.setdiff1d(np.arange(n), fixed)
    Gamma = qp.gram.values
    if fixed.size == 0:
        return ConditionalGaussian(
            mean=np.zeros(n),
            covariance=Gamma.copy(),
            free_indices=free,
            fixed_indices=fixed,
            fixed_values=np.zeros(0),
            partition=qp.partition,
            jitter=0.0,
        )
    Sdd = Gamma[np.ix_(fixed, fixed)]
    Sfd = Gamma[np.ix_(free, fixed)]
    Sff = Gamma[np.ix_(free, free)]
    fac, _ = chol_with_jitter(Sdd, qp.kernel.sigma**2)
    alpha = cho_solve((fac, True), qp.eq_values)
    mean = Sfd @ alpha
    cov = Sff - Sfd @ cho_solve((fac, True), Sfd.T)
    cov = 0.5 * (cov + cov.T)
    return ConditionalGaussian(
        mean=mean,
        covariance=cov,
        free_indices=free,
        fixed_indices=fixed,
        fixed_values=np.asarray(qp.eq_values, dtype=float),
        partition=qp.partition,
        jitter=0.0,
    )


def _free_rows(cg: ConditionalGaussian, ineq: LinearInequalitySystem):
    """One-sided rows a.c >= b restricted to the free coordinates, with the
    fixed contribution moved to the right-hand side."""
    n = cg.free_indices.size + cg.fixed_indices.size
    A, b = _one_sided_rows(ineq, n)
    if A.shape[0] == 0:
        return np.zeros((0, cg.dim)), np.zeros(0)
    Af = A[:, cg.free_indices]
    rhs = b - A[:, cg.fixed_indices] @ cg.fixed_values
    # rows touching only fixed coordinates must hold outright
    pure = np.all(Af == 0.0, axis=1)
    if np.any(pure) and np.any(rhs[pure] > FEAS_TOL):
        raise InfeasiblePolytope("fixed data values violate the constraints")
    keep = ~pure
    return Af[keep], rhs[keep]


def _interior_point(Af, rhs):
    """Max-slack (Chebyshev-style) strictly feasible free vector."""
    m, d = Af.shape
    norms = np.linalg.norm(Af, axis=1)
    # variables: (x, t); maximize t with Af x - t ||a_i|| >= rhs
    A_ub = np.hstack([-Af, norms[:, None]])
    res = linprog(
        c=np.concatenate([np.zeros(d), [-1.0]]),
        A_ub=A_ub,
        b_ub=-rhs,
        bounds=[(None, None)] * d + [(None, 1.0)],
        method="highs",
    )
    if res.status == 2 or not res.success:
        raise InfeasiblePolytope("the truncation polytope is empty")
    if res.x[-1] < 0:
        raise InfeasiblePolytope("the truncation polytope is empty")
    return res.x[:d]


def _truncated_standard_normal(rng, alpha, beta):
    """One draw of a standard normal conditioned to [alpha, beta]."""
    lo, hi = ndtr(alpha), ndtr(beta)
    if hi - lo < 1e-15:
        # numerically degenerate interval deep in a tail
        return alpha if abs(alpha) < abs(beta) else beta
    z = ndtri(rng.uniform(lo, hi))
    return float(np.clip(z, alpha, beta))


def sample(
    cg: ConditionalGaussian,
    ineq: LinearInequalitySystem,
    n_samples: int,
    seed: int,
    pilot_size: int = PILOT_SIZE,
    pilot_threshold: float = PILOT_THRESHOLD,
    burn_in: int = GIBBS_BURN_IN,
    thinning: int = GIBBS_THINNING,
) -> SampleBatch:
    """Draw feasible knot-value vectors from the truncated posterior.

    Rejection first; automatic switch to Gibbs when the pilot acceptance
    falls below ``pilot_threshold``.  Reproducible given ``seed``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    d = cg.dim

    if d == 0:
        full = cg.assemble(np.zeros(0))
        if not is_feasible(ineq, full, tol=FEAS_TOL):
            raise InfeasiblePolytope("data values violate the constraints")
        draws = [CoefVector(cg.partition, full.copy()) for _ in range(n_samples)]
        return SampleBatch(draws, n_samples, n_samples, n_samples, REJECTION, seed, 1.0)

    L, cov_jitter = chol_with_jitter(cg.covariance, max(np.max(np.diag(cg.covariance)), 1e-30))
    Af, rhs = _free_rows(cg, ineq)

    def propose(k):
        Z = rng.standard_normal((k, d))
        return cg.mean[None, :] + Z @ L.T

    def feasible_mask(X):
        if Af.shape[0] == 0:
            return np.ones(X.shape[0], dtype=bool)
        R = X @ Af.T
        return np.all(R >= rhs[None, :] - FEAS_TOL, axis=1)

    accepted = []
    n_proposed = 0
    pilot = propose(pilot_size)
    n_proposed += pilot_size
    mask = feasible_mask(pilot)
    for row in pilot[mask]:
        accepted.append(row.copy())
    rate = mask.mean()

    if rate >= pilot_threshold or Af.shape[0] == 0:
        max_proposals = max(200 * pilot_size, int(50 * n_samples / max(rate, 1e-3)))
        while len(accepted) < n_samples and n_proposed < max_proposals:
            chunk = propose(pilot_size)
            n_proposed += pilot_size
            m = feasible_mask(chunk)
            for row in chunk[m]:
                accepted.append(row.copy())
        if len(accepted) < n_samples:
            raise StallDetected(
                f"rejection sampler accepted {len(accepted)}/{n_samples} after "
                f"{n_proposed} proposals"
            )
        frees = accepted[:n_samples]
        draws = [CoefVector(cg.partition, cg.assemble(f)) for f in frees]
        return SampleBatch(
            draws,
            n_samples,
            len(accepted),
            n_proposed,
            REJECTION,
            seed,
            acceptance_rate=len(accepted) / n_proposed,
            meta={"pilot_acceptance": float(rate), "cov_jitter": cov_jitter},
        )

    # Gibbs over the truncated Gaussian
    x = _interior_point(Af, rhs)
    prec = cho_solve((L, True), np.eye(d))
    prec = 0.5 * (prec + prec.T)
    diag = np.diag(prec)
    sds = 1.0 / np.sqrt(diag)
    touching = [np.nonzero(Af[:, j] != 0.0)[0] for j in range(d)]
    r = prec @ (x - cg.mean)
    s = Af @ x if Af.shape[0] else np.zeros(0)
    scale = max(1.0, float(np.max(np.abs(rhs))) if rhs.size else 1.0)

    def sweep():
        nonlocal x, r, s
        for j in range(d):
            m_j = x[j] - r[j] / diag[j]
            lo, hi = -np.inf, np.inf
            for i in touching[j]:
                a = Af[i, j]
                resid = rhs[i] - (s[i] - a * x[j])
                if a > 0:
                    lo = max(lo, resid / a)
                else:
                    hi = min(hi, resid / a)
            if lo > hi + FEAS_TOL * scale:
                raise StallDetected(f"empty Gibbs interval at free coordinate {j}")
            lo, hi = min(lo, hi), max(lo, hi)
            z = _truncated_standard_normal(rng, (lo - m_j) / sds[j], (hi - m_j) / sds[j])
            new = m_j + sds[j] * z
            dx = new - x[j]
            if dx != 0.0:
                r += prec[:, j] * dx
                if s.size:
                    s += Af[:, j] * dx
                x[j] = new

    for _ in range(burn_in):
        sweep()
    draws = []
    for _ in range(n_samples):
        for _ in range(thinning):
            sweep()
        draws.append(CoefVector(cg.partition, cg.assemble(x.copy())))
    return SampleBatch(
        draws,
        n_samples,
        n_samples,
        n_proposed,
        GIBBS,
        seed,
        acceptance_rate=1.0,
        meta={
            "pilot_acceptance": float(rate),
            "burn_in": burn_in,
            "thinning": thinning,
            "cov_jitter": cov_jitter,
        },
    )


def posterior_summary(batch: SampleBatch, grid) -> PosteriorSummary:
    """Per-grid-point mean, sd, Monte-Carlo standard error and 2.5/97.5
    percentiles of the piecewise-linear draws."""
    if not batch.draws:
        raise EmptyBatch("no draws in batch")
    grid = np.asarray(grid, dtype=float)
    paths = np.vstack([evaluate_pl(c, grid) for c in batch.draws])
    n = paths.shape[0]
    mean = paths.mean(axis=0)
    sd = paths.std(axis=0, ddof=1) if n > 1 else np.zeros_like(mean)
    return PosteriorSummary(
        grid=grid,
        mean=mean,
        sd=sd,
        mcse=sd / np.sqrt(n),
        q025=np.percentile(paths, 2.5, axis=0),
        q975=np.percentile(paths, 97.5, axis=0),
    )
