"""Spline basis construction invariants."""

import numpy as np
import pytest

from semrel.errors import DegenerateCovariate
from semrel.gammlite import BSplineBasis, SmoothTermSpec, bspline_basis


def test_spec_validation():
    with pytest.raises(ValueError):
        SmoothTermSpec("x", degree=0)
    with pytest.raises(ValueError):
        SmoothTermSpec("x", basis_size=3, degree=3)
    with pytest.raises(ValueError):
        SmoothTermSpec("x", penalty_order=0)
    spec = SmoothTermSpec("x")
    assert (spec.basis_size, spec.degree, spec.penalty_order) == (10, 3, 2)


@pytest.mark.parametrize("basis_size,degree", [(4, 3), (6, 2), (10, 3), (13, 3)])
def test_raw_rows_partition_of_unity(basis_size, degree):
    rng = np.random.default_rng(basis_size)
    x = rng.uniform(-3, 7, size=200)
    basis = bspline_basis(x, SmoothTermSpec("x", basis_size=basis_size, degree=degree))
    raw = basis.raw_design(x)
    assert raw.shape == (200, basis.k)
    np.testing.assert_allclose(raw.sum(axis=1), 1.0, atol=1e-12)
    assert raw.min() >= 0.0


def test_boundary_values_included():
    x = np.linspace(0, 1, 50)
    basis = bspline_basis(x, SmoothTermSpec("x"))
    raw = basis.raw_design(np.array([0.0, 1.0]))
    np.testing.assert_allclose(raw.sum(axis=1), 1.0, atol=1e-12)


def test_evaluation_clamps_to_training_range():
    x = np.linspace(2, 5, 80)
    basis = bspline_basis(x, SmoothTermSpec("x"))
    below = basis.design(np.array([-10.0]))
    at_min = basis.design(np.array([2.0]))
    above = basis.design(np.array([99.0]))
    at_max = basis.design(np.array([5.0]))
    np.testing.assert_array_equal(below, at_min)
    np.testing.assert_array_equal(above, at_max)


def test_centering_and_column_drop():
    rng = np.random.default_rng(1)
    x = rng.uniform(size=300)
    basis = bspline_basis(x, SmoothTermSpec("x"))
    block = basis.design(x)
    assert block.shape == (300, basis.k - 1)
    assert basis.n_columns == basis.k - 1
    np.testing.assert_allclose(block.mean(axis=0), 0.0, atol=1e-12)


def test_spans_linear_functions():
    # cubic splines reproduce low-order polynomials over the knot range
    rng = np.random.default_rng(2)
    x = rng.uniform(size=120)
    basis = bspline_basis(x, SmoothTermSpec("x"))
    raw = basis.raw_design(x)
    target = 3.0 * x - 1.25
    coef, residual, *_ = np.linalg.lstsq(raw, target, rcond=None)
    fitted = raw @ coef
    assert np.abs(fitted - target).max() < 1e-9


def test_quantile_knots_reduce_for_few_distinct_values():
    x = np.array([0.0] * 40 + [1.0] * 40 + [2.0] * 40)
    basis = bspline_basis(x, SmoothTermSpec("x", basis_size=10))
    assert basis.k < 10
    assert basis.notes and "reduced" in basis.notes[0]


def test_constant_covariate_rejected():
    with pytest.raises(DegenerateCovariate):
        bspline_basis(np.full(50, 3.3), SmoothTermSpec("x"))


def test_non_finite_covariate_rejected():
    with pytest.raises(ValueError):
        bspline_basis(np.array([1.0, np.nan, 2.0]), SmoothTermSpec("x"))


def test_penalty_positive_definite():
    rng = np.random.default_rng(3)
    basis = bspline_basis(rng.uniform(size=150), SmoothTermSpec("x"))
    S = basis.penalty()
    assert S.shape == (basis.k - 1, basis.k - 1)
    np.testing.assert_allclose(S, S.T, atol=1e-14)
    assert np.linalg.eigvalsh(S).min() > 0


def test_grid_endpoints():
    basis = bspline_basis(np.linspace(-2, 4, 60), SmoothTermSpec("x"))
    g = basis.grid(11)
    assert g[0] == -2 and g[-1] == 4 and g.shape == (11,)
