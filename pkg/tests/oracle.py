"""Independent brute-force solver used to cross-check the MAP QP.

Everything here is written from the problem statement alone: the kernel
matrix is assembled from the covariance formulas directly, the problem is
whitened through a plain numpy Cholesky factor, and the minimizer is
found by projected gradient descent where the projection onto the
constraint polytope is computed by Dykstra's alternating-projection
scheme over the individual hyperplanes/halfspaces.  Nothing from
constrained_gp's solver path is reused.
"""

import numpy as np


def kernel_matrix(family, sigma, theta, pts):
    pts = np.asarray(pts, dtype=float)
    D = np.abs(pts[:, None] - pts[None, :])
    if family == "squared_exponential":
        return sigma**2 * np.exp(-(D**2) / (2.0 * theta**2))
    if family == "matern52":
        s = np.sqrt(5.0) * D / theta
        return sigma**2 * (1.0 + s + s**2 / 3.0) * np.exp(-s)
    raise ValueError(family)


def constraint_rows(kind, knots, lo=None, hi=None):
    """One-sided rows (a, b, is_eq=False) meaning a.c >= b."""
    n = len(knots)
    rows = []
    if kind == "bounds":
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            if lo is not None and np.isfinite(lo):
                rows.append((e.copy(), float(lo)))
            if hi is not None and np.isfinite(hi):
                rows.append((-e.copy(), -float(hi)))
    elif kind == "monotone":
        for j in range(n - 1):
            a = np.zeros(n)
            a[j] = -1.0
            a[j + 1] = 1.0
            rows.append((a, 0.0))
    elif kind == "convex":
        for j in range(n - 2):
            h0 = knots[j + 1] - knots[j]
            h1 = knots[j + 2] - knots[j + 1]
            a = np.zeros(n)
            a[j] = 1.0 / h0
            a[j + 1] = -1.0 / h0 - 1.0 / h1
            a[j + 2] = 1.0 / h1
            rows.append((a, 0.0))
    elif kind == "none":
        pass
    else:
        raise ValueError(kind)
    return rows


def _dykstra(z0, eq_rows, ineq_rows, sweeps=600, tol=1e-14):
    """Project z0 onto the intersection of hyperplanes a.z = b and
    halfspaces a.z >= b by Dykstra's algorithm."""
    sets = [(a, b, True) for a, b in eq_rows] + [(a, b, False) for a, b in ineq_rows]
    z = z0.copy()
    incs = [np.zeros_like(z0) for _ in sets]
    for _ in range(sweeps):
        z_prev = z.copy()
        for i, (a, b, is_eq) in enumerate(sets):
            w = z + incs[i]
            aa = a @ a
            viol = b - (a @ w)
            if is_eq or viol > 0:
                z_new = w + (viol / aa) * a
            else:
                z_new = w
            incs[i] = w - z_new
            z = z_new
        if np.max(np.abs(z - z_prev)) < tol * max(1.0, np.max(np.abs(z))):
            break
    return z


def solve_reference(family, sigma, theta, knots, eq_idx, eq_val, ineqs,
                    outer=400, step=0.3):
    """Minimize c^T K^{-1} c subject to c[eq_idx] = eq_val and the
    one-sided rows in ``ineqs`` (list of (a, b) meaning a.c >= b).

    Whitened projected gradient: with c = L z the objective is |z|^2,
    so each iteration contracts toward the origin and projects back onto
    the transformed polytope.  Returns the knot values c.
    """
    K = kernel_matrix(family, sigma, theta, knots)
    L = np.linalg.cholesky(K)
    eq_rows = []
    for i, v in zip(eq_idx, eq_val):
        a = L[i, :].copy()  # (e_i^T L) z = v
        eq_rows.append((a, float(v)))
    ineq_rows = [(a @ L, float(b)) for a, b in ineqs]

    z = np.zeros(len(knots))
    z = _dykstra(z, eq_rows, ineq_rows)
    for _ in range(outer):
        z_next = _dykstra((1.0 - 2.0 * step) * z, eq_rows, ineq_rows)
        if np.max(np.abs(z_next - z)) < 1e-12 * max(1.0, np.max(np.abs(z))):
            z = z_next
            break
        z = z_next
    return L @ z
