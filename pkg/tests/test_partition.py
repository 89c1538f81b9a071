import numpy as np
import pytest

from constrained_gp import (
    CoefVector,
    DuplicateKnot,
    OutOfDomain,
    Partition,
    dyadic_ladder,
    dyadic_refine,
    evaluate_pl,
    hat_evaluate,
    project,
    refine,
    uniform_partition,
)
from constrained_gp.errors import DimensionMismatch


def test_uniform_trivial():
    p = uniform_partition(1)
    assert np.array_equal(p.knots, [0.0, 1.0])
    assert p.n_cells == 1
    assert p.mesh == 1.0


def test_uniform_50():
    p = uniform_partition(50)
    assert p.knots.size == 51
    assert p.mesh == pytest.approx(0.02)


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition(np.array([0.0, 0.5, 0.9]))  # missing endpoint 1
    with pytest.raises(ValueError):
        Partition(np.array([0.0, 0.5, 0.5, 1.0]))  # not strictly increasing
    with pytest.raises(ValueError):
        Partition(np.array([0.3]))


def test_refine_keeps_existing_knots():
    p = uniform_partition(4)
    q = refine(p, [0.1, 0.6])
    assert set(np.round(p.knots, 12)).issubset(set(np.round(q.knots, 12)))
    assert q.knots.size == p.knots.size + 2
    assert q.level == p.level + 1


def test_refine_duplicate_raises():
    p = uniform_partition(4)
    with pytest.raises(DuplicateKnot):
        refine(p, [0.25])
    with pytest.raises(DuplicateKnot):
        refine(p, [0.5, 0.5 + 1e-15])


def test_refine_outside_open_interval():
    p = uniform_partition(4)
    with pytest.raises(ValueError):
        refine(p, [0.0])
    with pytest.raises(ValueError):
        refine(p, [1.0])


def test_dyadic_refine_doubles_cells():
    p = uniform_partition(4)
    q = dyadic_refine(p)
    assert q.n_cells == 8
    assert np.allclose(q.knots, np.linspace(0, 1, 9))


def test_dyadic_ladder_nested():
    ladder = dyadic_ladder(4, 4)
    assert [p.n_cells for p in ladder] == [4, 8, 16, 32]
    for coarse, fine in zip(ladder, ladder[1:]):
        assert set(np.round(coarse.knots, 12)).issubset(set(np.round(fine.knots, 12)))


def test_hat_kronecker_property():
    p = uniform_partition(8)
    for j in range(p.knots.size):
        vals = hat_evaluate(p, j, p.knots)
        expected = np.zeros(p.knots.size)
        expected[j] = 1.0
        assert np.array_equal(vals, expected)


def test_hat_midpoint_value():
    p = uniform_partition(2)
    assert hat_evaluate(p, 1, 0.25) == pytest.approx(0.5)


def test_partition_of_unity():
    p = uniform_partition(13)
    rng = np.random.default_rng(0)
    xs = rng.uniform(0, 1, 1000)
    total = sum(hat_evaluate(p, j, xs) for j in range(p.knots.size))
    assert np.max(np.abs(total - 1.0)) < 1e-14


def test_evaluate_pl_linear_exact():
    p = uniform_partition(4)
    c = CoefVector(p, p.knots.copy())
    xs = np.array([0.0, 0.37, 0.5, 0.93, 1.0])
    assert np.max(np.abs(evaluate_pl(c, xs) - xs)) < 1e-15


def test_evaluate_pl_chord():
    p = uniform_partition(2)
    c = project(lambda x: np.asarray(x) ** 2, p)
    # chord of x^2 between 0 and 0.5 evaluated at 0.25
    assert evaluate_pl(c, 0.25) == pytest.approx(0.125)


def test_out_of_domain_raises():
    p = uniform_partition(4)
    c = CoefVector(p, np.zeros(5))
    with pytest.raises(OutOfDomain):
        evaluate_pl(c, 1.5)
    with pytest.raises(OutOfDomain):
        hat_evaluate(p, 0, -0.1)


def test_coef_vector_length_checked():
    p = uniform_partition(4)
    with pytest.raises(DimensionMismatch):
        CoefVector(p, np.zeros(4))


def test_project_reproduces_knot_values():
    p = uniform_partition(10)
    f = lambda x: np.sin(3 * np.asarray(x))
    c = project(f, p)
    assert np.array_equal(c.values, f(p.knots))


def test_project_scalar_function():
    p = uniform_partition(3)
    c = project(lambda t: float(t) + 1.0, p)
    assert np.allclose(c.values, p.knots + 1.0)


def test_projection_error_halves_with_refinement():
    f = lambda x: np.sin(2 * np.pi * np.asarray(x))
    grid = np.linspace(0, 1, 2001)
    errs = []
    for p in dyadic_ladder(8, 3):
        c = project(f, p)
        errs.append(np.max(np.abs(evaluate_pl(c, grid) - f(grid))))
    # second-order convergence: each refinement divides the error by ~4
    assert errs[1] / errs[0] < 0.3
    assert errs[2] / errs[1] < 0.3


def test_index_of():
    p = uniform_partition(4)
    assert p.index_of(0.5) == 2
    assert p.index_of(0.5 + 1e-14) == 2
    assert p.index_of(0.3) is None
