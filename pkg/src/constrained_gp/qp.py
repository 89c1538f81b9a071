"""MAP estimation as a strictly convex quadratic program.

The mode of the constrained posterior at a fixed partition minimizes
``c^T Gamma^{-1} c`` subject to interpolation equalities and the
knot-level inequality system.  The solver is a primal active-set method
that never applies ``Gamma^{-1}``: every equality-constrained subproblem

    min c^T Gamma^{-1} c   s.t.  M c = v

is solved in closed form as ``c = Gamma M^T mu`` with
``(M Gamma M^T) mu = v``, so only forward products with Gamma and a small
SPD solve appear.  Feasibility of the polytope is established up front by
a phase-1 linear program; an empty polytope is reported as Infeasible,
never as an iteration failure.

KKT residuals are recomputed from scratch on the returned point (not
taken from solver internals).  The stationarity residual is measured in
the Gamma-preconditioned form ``||2c - Gamma (M^T mu)||`` and all four
residuals are relative max-norms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import linprog

from .constraints import ConstraintSpec, LinearInequalitySystem, encode_all
from .errors import DataCollision
from .kernels import GramMatrix, Kernel, gram
from .partition import CoefVector, Partition, evaluate_pl, refine, uniform_partition
from .rkhs import DesignData, hn_norm_sq

DEFAULT_TOL = 1e-8
SLATER_WARN_SLACK = 1e-6

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_MAX_ITER = "max_iter"


@dataclass(frozen=True)
class QpProblem:
    kernel: Kernel
    partition: Partition
    gram: GramMatrix
    eq_indices: np.ndarray
    eq_values: np.ndarray
    ineq: LinearInequalitySystem

    @property
    def n(self) -> int:
        return self.partition.knots.size


@dataclass(frozen=True)
class MapSolution:
    coef: CoefVector
    objective: float
    kkt_residuals: dict
    iterations: int
    status: str
    min_slack: float
    slater_margin: float
    jitter: float

    @property
    def is_optimal(self) -> bool:
        return self.status == STATUS_OPTIMAL


@dataclass(frozen=True)
class ConvergenceReport:
    levels: tuple
    objectives: np.ndarray
    sup_gaps: np.ndarray
    grid: np.ndarray
    curves: tuple
    solutions: tuple


def _normalize_specs(spec) -> tuple:
    if isinstance(spec, ConstraintSpec):
        return (spec,)
    return tuple(spec)


def build_problem(data: DesignData, spec, p: Partition, kernel: Kernel) -> QpProblem:
    """Align data with the knots and assemble the QP.

    A data point within half the mesh size of its nearest knot is snapped
    to it; otherwise (including the exact half-mesh boundary) the point is
    inserted as a new knot, preserving nesting.  Two data points landing
    on the same knot raise DataCollision.
    """
    specs = _normalize_specs(spec)
    mesh = p.mesh
    targets = []
    to_insert = []
    for x in data.points:
        j = int(np.argmin(np.abs(p.knots - x)))
        d = abs(p.knots[j] - x)
        if d <= 1e-12 or d < 0.5 * mesh:
            targets.append(p.knots[j])
        else:
            targets.append(float(x))
            to_insert.append(float(x))
    if to_insert:
        p = refine(p, to_insert)
    idx = np.searchsorted(p.knots, targets)
    # guard against one-off placement from floating-point in searchsorted
    for k, t in enumerate(targets):
        j = int(np.argmin(np.abs(p.knots - t)))
        idx[k] = j
    if np.unique(idx).size != idx.size:
        raise DataCollision("two data points snap to the same knot")
    return QpProblem(
        kernel=kernel,
        partition=p,
        gram=gram(kernel, p),
        eq_indices=np.asarray(idx, dtype=int),
        eq_values=np.asarray(data.values, dtype=float),
        ineq=encode_all(specs, p),
    )


def _one_sided_rows(ineq: LinearInequalitySystem, n: int):
    """Rewrite lower <= G c <= upper as rows a.c >= b."""
    rows = []
    rhs = []
    for i in range(ineq.n_rows):
        g = ineq.matrix[i]
        if np.isfinite(ineq.lower[i]):
            rows.append(g)
            rhs.append(ineq.lower[i])
        if np.isfinite(ineq.upper[i]):
            rows.append(-g)
            rhs.append(-ineq.upper[i])
    if rows:
        return np.asarray(rows), np.asarray(rhs)
    return np.zeros((0, n)), np.zeros(0)


def _slater_margin(A_in, b_in, E, y) -> float:
    """Largest uniform slack achievable over the feasible set (capped at
    1); a strictly positive value certifies a nonempty relative interior
    of the inequality polytope within the interpolation subspace."""
    if A_in.shape[0] == 0:
        return np.inf
    n = E.shape[1]
    norms = np.linalg.norm(A_in, axis=1)
    res = linprog(
        c=np.concatenate([np.zeros(n), [-1.0]]),
        A_ub=np.hstack([-A_in, norms[:, None]]),
        b_ub=-b_in,
        A_eq=np.hstack([E, np.zeros((E.shape[0], 1))]) if E.shape[0] else None,
        b_eq=y if E.shape[0] else None,
        bounds=[(None, None)] * n + [(None, 1.0)],
        method="highs",
    )
    if not res.success:
        return -np.inf
    return float(res.x[-1])


def _phase1(A_in, b_in, E, y):
    """Feasible point of {E c = y, A_in c >= b_in} or None (empty)."""
    n = E.shape[1]
    res = linprog(
        c=np.zeros(n),
        A_ub=-A_in if A_in.size else None,
        b_ub=-b_in if A_in.size else None,
        A_eq=E,
        b_eq=y,
        bounds=[(None, None)] * n,
        method="highs",
    )
    if res.status == 2:
        return None
    if not res.success:
        raise RuntimeError(f"phase-1 LP failed unexpectedly: {res.message}")
    return np.asarray(res.x, dtype=float)


def _subproblem(Gamma, M, v):
    """Solve min c^T Gamma^{-1} c s.t. M c = v: c = Gamma M^T mu with
    (M Gamma M^T) mu = v; one step of iterative refinement."""
    S = M @ (Gamma @ M.T)
    S = 0.5 * (S + S.T)
    try:
        fac = cho_factor(S, lower=True)
        mu = cho_solve(fac, v)
        mu += cho_solve(fac, v - S @ mu)
    except np.linalg.LinAlgError:
        mu = np.linalg.lstsq(S, v, rcond=None)[0]
    c = Gamma @ (M.T @ mu)
    return c, mu


def _kkt_residuals(Gamma, c, E, y, A_in, b_in, W, mu):
    """Relative KKT residual max-norms, recomputed from the candidate
    point and multipliers only."""
    scale_c = max(1.0, float(np.max(np.abs(2.0 * c))))
    M = np.vstack([E, A_in[W]]) if len(W) else E
    stat = np.max(np.abs(2.0 * c - Gamma @ (M.T @ (2.0 * mu)))) / scale_c
    scale_y = max(1.0, float(np.max(np.abs(y))) if y.size else 1.0)
    primal_eq = float(np.max(np.abs(E @ c - y))) / scale_y if y.size else 0.0
    if A_in.shape[0]:
        slack = A_in @ c - b_in
        scale_b = max(1.0, float(np.max(np.abs(b_in))))
        primal_ineq = max(0.0, float(np.max(-slack))) / scale_b
        lam = 2.0 * mu[E.shape[0]:]
        comp = 0.0
        for k, i in enumerate(W):
            comp = max(comp, abs(lam[k] * slack[i]))
        comp /= max(1.0, float(np.max(np.abs(lam))) if len(W) else 1.0) * scale_b
        min_slack = float(np.min(slack))
    else:
        primal_ineq = 0.0
        comp = 0.0
        min_slack = np.inf
    return (
        {
            "stationarity": float(stat),
            "primal_eq": float(primal_eq),
            "primal_ineq": float(primal_ineq),
            "complementarity": float(comp),
        },
        min_slack,
    )


def solve_map(qp: QpProblem, tol: float = DEFAULT_TOL, max_iter: int | None = None) -> MapSolution:
    """Minimize c^T Gamma^{-1} c over the interpolation/inequality polytope.

    Deterministic primal active-set iteration; see module docstring for
    the linear algebra.  Returns status ``infeasible`` when the polytope
    is empty (phase-1 LP), ``max_iter`` when the iteration budget
    (default 50 (N+1)) is exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = qp.n
    if max_iter is None:
        max_iter = 50 * n
    Gamma = qp.gram.regularized
    E = np.zeros((qp.eq_indices.size, n))
    E[np.arange(qp.eq_indices.size), qp.eq_indices] = 1.0
    y = qp.eq_values
    A_in, b_in = _one_sided_rows(qp.ineq, n)

    x0 = _phase1(A_in, b_in, E, y)
    if x0 is None:
        return MapSolution(
            coef=CoefVector(qp.partition, np.full(n, np.nan)),
            objective=np.nan,
            kkt_residuals={},
            iterations=0,
            status=STATUS_INFEASIBLE,
            min_slack=-np.inf,
            slater_margin=-np.inf,
            jitter=qp.gram.jitter_applied,
        )

    x = x0
    W: list[int] = []
    mu = np.zeros(E.shape[0])
    status = STATUS_MAX_ITER
    it = 0
    scale = max(
        1.0,
        float(np.max(np.abs(y))) if y.size else 1.0,
        float(np.max(np.abs(b_in[np.isfinite(b_in)]))) if b_in.size else 1.0,
    )
    for it in range(1, max_iter + 1):
        M = np.vstack([E, A_in[W]]) if W else E
        v = np.concatenate([y, b_in[W]]) if W else y
        c_star, mu = _subproblem(Gamma, M, v)
        p_dir = c_star - x
        if np.max(np.abs(p_dir), initial=0.0) <= 1e-10 * max(1.0, np.max(np.abs(x), initial=0.0)):
            lam = 2.0 * mu[E.shape[0]:]
            if lam.size == 0 or np.min(lam) >= -1e-9 * max(1.0, np.max(np.abs(lam))):
                x = c_star
                status = STATUS_OPTIMAL
                break
            W.pop(int(np.argmin(lam)))
            continue
        # longest feasible step toward the subproblem solution
        alpha = 1.0
        blocking = None
        if A_in.shape[0]:
            ap = A_in @ p_dir
            slack = np.maximum(A_in @ x - b_in, 0.0)
            outside = np.setdiff1d(np.arange(A_in.shape[0]), W, assume_unique=False)
            for i in outside:
                if ap[i] < -1e-13 * scale:
                    a_i = slack[i] / (-ap[i])
                    if a_i < alpha:
                        alpha = a_i
                        blocking = int(i)
        x = x + alpha * p_dir
        if blocking is not None:
            W.append(blocking)

    residuals, min_slack = _kkt_residuals(Gamma, x, E, y, A_in, b_in, W, mu)
    if status == STATUS_OPTIMAL and max(residuals.values()) > tol:
        status = STATUS_MAX_ITER
    margin = _slater_margin(A_in, b_in, E, y)
    if status == STATUS_OPTIMAL and margin < SLATER_WARN_SLACK:
        warnings.warn(
            f"strict-feasibility (Slater) margin {margin:.3e} is below "
            f"{SLATER_WARN_SLACK:g}; the interior of the feasible set is thin",
            stacklevel=2,
        )
    coef = CoefVector(qp.partition, x)
    return MapSolution(
        coef=coef,
        objective=hn_norm_sq(coef, qp.gram),
        kkt_residuals=residuals,
        iterations=it,
        status=status,
        min_slack=min_slack,
        slater_margin=margin,
        jitter=qp.gram.jitter_applied,
    )


def convergence_ladder(
    data: DesignData,
    spec,
    kernel: Kernel,
    levels,
    grid_size: int = 2001,
    tol: float = DEFAULT_TOL,
) -> ConvergenceReport:
    """Solve the MAP problem on each level of a (dyadic) ladder and report
    sup-norm gaps between consecutive solutions on a dense grid, plus the
    objective values."""
    levels = sorted(int(N) for N in levels)
    grid = np.linspace(0.0, 1.0, grid_size)
    curves = []
    objectives = []
    solutions = []
    for N in levels:
        qp = build_problem(data, spec, uniform_partition(N), kernel)
        sol = solve_map(qp, tol=tol)
        if sol.status == STATUS_INFEASIBLE:
            raise ValueError(f"level N={N} is infeasible")
        curves.append(evaluate_pl(sol.coef, grid))
        objectives.append(sol.objective)
        solutions.append(sol)
    gaps = np.array(
        [float(np.max(np.abs(curves[i + 1] - curves[i]))) for i in range(len(curves) - 1)]
    )
    return ConvergenceReport(
        levels=tuple(levels),
        objectives=np.asarray(objectives),
        sup_gaps=gaps,
        grid=grid,
        curves=tuple(curves),
        solutions=tuple(solutions),
    )
