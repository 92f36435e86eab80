import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semrel.errors import DimensionMismatch, EmptyInput, ZeroVector
from semrel.vecmath import as_vector, cosine, l2_norm, mean_vector

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def vectors(dim):
    return st.lists(finite, min_size=dim, max_size=dim).map(np.array)


def test_cosine_identical_is_one():
    v = np.array([3.0, 4.0])
    assert cosine(v, v) == 1.0


def test_cosine_orthogonal_is_zero():
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 2.0])) == pytest.approx(0.0, abs=1e-15)


def test_cosine_opposite_is_minus_one():
    got = cosine(np.array([1.0, 1.0]), np.array([-2.0, -2.0]))
    assert got == pytest.approx(-1.0, abs=1e-12)
    assert got >= -1.0


@given(u=vectors(4), v=vectors(4))
@settings(max_examples=200, deadline=None)
def test_cosine_bounds_and_symmetry(u, v):
    if l2_norm(u) == 0.0 or l2_norm(v) == 0.0:
        with pytest.raises(ZeroVector):
            cosine(u, v)
        return
    c = cosine(u, v)
    assert -1.0 <= c <= 1.0
    assert c == cosine(v, u)


@given(u=vectors(5), v=vectors(5),
       a=st.floats(min_value=1e-3, max_value=1e3),
       b=st.floats(min_value=1e-3, max_value=1e3))
@settings(max_examples=200, deadline=None)
def test_cosine_scale_invariance(u, v, a, b):
    if l2_norm(u) == 0.0 or l2_norm(v) == 0.0:
        return
    assert cosine(a * u, b * v) == pytest.approx(cosine(u, v), abs=1e-12)


def test_cosine_dim_mismatch():
    with pytest.raises(DimensionMismatch):
        cosine(np.array([1.0, 2.0]), np.array([1.0, 2.0, 3.0]))


def test_cosine_zero_vector():
    with pytest.raises(ZeroVector):
        cosine(np.zeros(3), np.array([1.0, 0.0, 0.0]))


def test_near_parallel_clamps_into_range():
    # rounding can push the raw ratio a hair above 1; the result must not escape
    u = np.array([1e-8, 1.0, 1e8])
    assert cosine(u, u) <= 1.0
    assert cosine(u, -u) >= -1.0


def test_as_vector_rejects_matrices():
    with pytest.raises(DimensionMismatch):
        as_vector(np.ones((2, 2)))


def test_l2_norm():
    assert l2_norm(np.array([3.0, 4.0])) == 5.0


def test_mean_vector():
    got = mean_vector([np.array([0.0, 2.0]), np.array([2.0, 0.0])])
    assert np.array_equal(got, np.array([1.0, 1.0]))


def test_mean_vector_empty():
    with pytest.raises(EmptyInput):
        mean_vector([])


def test_mean_vector_dim_mismatch():
    with pytest.raises(DimensionMismatch):
        mean_vector([np.array([1.0]), np.array([1.0, 2.0])])


def test_mean_of_singleton_is_the_vector():
    v = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(mean_vector([v]), v)


@given(vs=st.lists(vectors(3), min_size=1, max_size=6))
@settings(max_examples=100, deadline=None)
def test_mean_vector_within_componentwise_hull(vs):
    m = mean_vector(vs)
    stacked = np.stack(vs)
    assert np.all(m >= stacked.min(axis=0) - 1e-9)
    assert np.all(m <= stacked.max(axis=0) + 1e-9)


def test_cosine_accepts_lists():
    assert cosine([1.0, 0.0], [1.0, 0.0]) == 1.0


def test_cosine_known_value():
    # hand computation: dot = 0.9, norms 1 and sqrt(0.82)
    c = cosine(np.array([1.0, 0.0]), np.array([0.9, 0.1]))
    assert c == pytest.approx(0.9 / math.sqrt(0.82), abs=1e-15)
