import numpy as np
import pytest

from constrained_gp import (
    ConstraintSpec,
    DesignData,
    EmptyBatch,
    InfeasiblePolytope,
    Kernel,
    build_problem,
    condition_on_data,
    is_feasible,
    posterior_summary,
    sample,
    solve_map,
    uniform_partition,
)
from constrained_gp.constraints import empty_system
from constrained_gp.partition import evaluate_pl
from constrained_gp.sampler import SampleBatch

SE = Kernel("squared_exponential", 25.0, 0.2)


def _qp(points, values, spec, n_cells=10, kernel=SE):
    return build_problem(DesignData(points, values), spec, uniform_partition(n_cells), kernel)


def test_condition_pins_data_knots():
    qp = _qp([0.5], [10.0], ConstraintSpec.none(), n_cells=2)
    cg = condition_on_data(qp)
    assert np.array_equal(cg.fixed_indices, [1])
    assert np.array_equal(cg.fixed_values, [10.0])
    assert cg.dim == 2
    # conditional mean at a free knot is the kriging mean there
    expected = float(SE(0.0, 0.5)) / 625.0 * 10.0
    assert np.allclose(cg.mean, expected, rtol=1e-10)


def test_condition_all_knots_fixed():
    qp = _qp([0.0, 0.5, 1.0], [1.0, 2.0, 3.0], ConstraintSpec.none(), n_cells=2)
    cg = condition_on_data(qp)
    assert cg.dim == 0
    assert np.array_equal(cg.assemble(np.zeros(0)), [1.0, 2.0, 3.0])


def test_condition_covariance_psd_and_shrinks():
    qp = _qp([0.25, 0.75], [5.0, -5.0], ConstraintSpec.none(), n_cells=8)
    cg = condition_on_data(qp)
    w = np.linalg.eigvalsh(cg.covariance)
    assert w[0] > -1e-8
    # conditioning never increases the marginal variances
    marg = np.diag(qp.gram.values)[cg.free_indices]
    assert np.all(np.diag(cg.covariance) <= marg + 1e-8)


def test_sample_no_inequalities_matches_conditional_mean():
    qp = _qp([0.5], [10.0], ConstraintSpec.none(), n_cells=6)
    cg = condition_on_data(qp)
    batch = sample(cg, qp.ineq, 4000, seed=0)
    assert batch.method == "rejection"
    assert batch.acceptance_rate == 1.0
    free = np.array([c.values[cg.free_indices] for c in batch.draws])
    err = np.abs(free.mean(axis=0) - cg.mean)
    mc_sd = free.std(axis=0, ddof=1) / np.sqrt(free.shape[0])
    assert np.all(err <= 5.0 * mc_sd + 1e-12)


def test_draws_feasible_and_interpolating():
    qp = _qp([0.1, 0.4, 0.6, 0.9], [-20.0, 15.0, 18.0, -10.0],
             ConstraintSpec.bounds(-25.0, 20.0), n_cells=20)
    cg = condition_on_data(qp)
    batch = sample(cg, qp.ineq, 50, seed=42)
    assert batch.n_accepted >= 50
    for c in batch.draws:
        assert is_feasible(qp.ineq, c, tol=1e-8)
        assert np.max(np.abs(c.values[qp.eq_indices] - qp.eq_values)) < 1e-10


def test_seed_determinism():
    qp = _qp([0.5], [5.0], ConstraintSpec.bounds(-40.0, 40.0), n_cells=8)
    cg = condition_on_data(qp)
    a = sample(cg, qp.ineq, 20, seed=7)
    b = sample(cg, qp.ineq, 20, seed=7)
    for x, y in zip(a.draws, b.draws):
        assert np.array_equal(x.values, y.values)
    c = sample(cg, qp.ineq, 20, seed=8)
    assert not np.array_equal(a.draws[0].values, c.draws[0].values)


def test_acceptance_rate_bookkeeping():
    qp = _qp([0.5], [5.0], ConstraintSpec.bounds(-15.0, 15.0), n_cells=6)
    cg = condition_on_data(qp)
    batch = sample(cg, qp.ineq, 100, seed=1)
    assert batch.method == "rejection"
    assert batch.acceptance_rate == pytest.approx(batch.n_accepted / batch.n_proposed)
    assert 0 < batch.acceptance_rate <= 1


def _gibbs_case(lo, hi):
    kernel = Kernel("squared_exponential", 10.0, 0.15)
    qp = build_problem(
        DesignData([0.5], [5.0]), ConstraintSpec.bounds(lo, hi), uniform_partition(10), kernel
    )
    return qp, condition_on_data(qp)


def test_gibbs_triggered_on_hard_truncation():
    qp, cg = _gibbs_case(-5.0, 6.5)
    batch = sample(cg, qp.ineq, 50, seed=3)
    assert batch.method == "gibbs"
    assert batch.meta["pilot_acceptance"] < 0.01
    assert batch.meta["burn_in"] == 1000
    assert batch.meta["thinning"] == 10
    for c in batch.draws:
        assert is_feasible(qp.ineq, c, tol=1e-8)


def test_gibbs_agrees_with_rejection():
    # moderate truncation where rejection still works: compare grid means
    qp, cg = _gibbs_case(-6.0, 7.0)
    grid = np.linspace(0, 1, 41)
    rej = sample(cg, qp.ineq, 800, seed=10)
    assert rej.method == "rejection"
    gib = sample(cg, qp.ineq, 800, seed=11, pilot_threshold=1.0)
    assert gib.method == "gibbs"
    s_rej = posterior_summary(rej, grid)
    s_gib = posterior_summary(gib, grid)
    combined = np.sqrt(s_rej.mcse**2 + s_gib.mcse**2)
    assert np.all(np.abs(s_rej.mean - s_gib.mean) <= 4.0 * combined + 1e-9)


def test_untruncated_moments_match_conditional():
    qp = _qp([0.5], [10.0], ConstraintSpec.none(), n_cells=6)
    cg = condition_on_data(qp)
    batch = sample(cg, qp.ineq, 10_000, seed=5)
    free = np.array([c.values[cg.free_indices] for c in batch.draws])
    emp = np.cov(free.T)
    rel = np.linalg.norm(emp - cg.covariance) / np.linalg.norm(cg.covariance)
    assert rel < 0.15


def test_infeasible_fixed_values_raise():
    qp = _qp([0.5], [10.0], ConstraintSpec.bounds(-1.0, 1.0), n_cells=4)
    cg = condition_on_data(qp)
    with pytest.raises(InfeasiblePolytope):
        sample(cg, qp.ineq, 10, seed=0)


def test_sample_requires_positive_count():
    qp = _qp([0.5], [5.0], ConstraintSpec.none(), n_cells=4)
    cg = condition_on_data(qp)
    with pytest.raises(ValueError):
        sample(cg, qp.ineq, 0, seed=0)


def test_all_knots_fixed_degenerate_batch():
    qp = _qp([0.0, 0.5, 1.0], [1.0, 2.0, 3.0], ConstraintSpec.bounds(0.0, 5.0), n_cells=2)
    cg = condition_on_data(qp)
    batch = sample(cg, qp.ineq, 5, seed=0)
    assert len(batch.draws) == 5
    for c in batch.draws:
        assert np.array_equal(c.values, [1.0, 2.0, 3.0])


def test_posterior_summary_shapes_and_order():
    qp = _qp([0.5], [5.0], ConstraintSpec.bounds(-30.0, 30.0), n_cells=6)
    cg = condition_on_data(qp)
    batch = sample(cg, qp.ineq, 200, seed=2)
    grid = np.linspace(0, 1, 101)
    s = posterior_summary(batch, grid)
    assert s.mean.shape == grid.shape
    assert np.all(s.q025 <= s.mean + 1e-12) and np.all(s.mean <= s.q975 + 1e-12)
    assert np.all(s.mcse <= s.sd + 1e-15)
    # the data knot is pinned: zero spread there
    j = np.argmin(np.abs(grid - 0.5))
    assert s.sd[j] < 1e-12
    assert s.mean[j] == pytest.approx(5.0, abs=1e-10)


def test_posterior_summary_empty_batch():
    batch = SampleBatch([], 0, 0, 0, "rejection", 0, 0.0)
    with pytest.raises(EmptyBatch):
        posterior_summary(batch, np.linspace(0, 1, 11))


def test_map_of_sampled_polytope_is_mode_not_mean():
    # hard one-sided truncation: the posterior mean moves away from the MAP
    qp = _qp([0.1, 0.4, 0.6, 0.9], [-20.0, 15.0, 18.0, -10.0],
             ConstraintSpec.bounds(-25.0, 20.0), n_cells=20)
    cg = condition_on_data(qp)
    sol = solve_map(qp)
    batch = sample(cg, qp.ineq, 300, seed=9)
    grid = np.linspace(0, 1, 201)
    s = posterior_summary(batch, grid)
    map_curve = evaluate_pl(sol.coef, grid)
    assert np.any(np.abs(s.mean - map_curve) > 3.0 * s.mcse)
