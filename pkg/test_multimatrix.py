from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import ShapeMismatch, SpecError, TraceNotFaithful
from multimatrix import (
    AmbientAlgebra,
    DimensionVector,
    TraceFunctional,
    adjoint,
    as_int,
    extend_orthonormal,
    is_positive,
    null_space,
    orthonormal_rows,
    product,
    trace_defect,
)

dims_strategy = st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=3)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.mark.parametrize("bad", [(), (0,), (2, -1), (1.5,), (True,)])
def test_dimension_vector_rejects_bad_entries(bad):
    with pytest.raises(SpecError):
        DimensionVector(bad)


def test_dimension_vector_sizes():
    n = DimensionVector((2, 3))
    assert n.size == 5
    assert n.linear_dim == 13
    assert n.offsets() == [0, 2]


def test_matrix_units_multiply_like_units():
    amb = AmbientAlgebra.from_dims((2, 3))
    e01 = amb.matrix_unit(1, 0, 1)
    e12 = amb.matrix_unit(1, 1, 2)
    np.testing.assert_allclose(e01 @ e12, amb.matrix_unit(1, 0, 2))
    assert np.allclose(amb.matrix_unit(0, 1, 1) @ e01, 0)
    assert len(amb.unit_positions()) == 13


def test_contains_only_block_diagonal():
    amb = AmbientAlgebra.from_dims((1, 2))
    assert amb.contains(amb.identity())
    off = np.zeros((3, 3))
    off[0, 2] = 1.0
    assert not amb.contains(off)


def test_product_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        product(np.eye(2), np.eye(3))


@given(dims=dims_strategy, seed=seeds)
@settings(max_examples=30, deadline=None)
def test_random_elements_stay_in_the_algebra(dims, seed):
    amb = AmbientAlgebra.from_dims(dims)
    rng = np.random.default_rng(seed)
    a, b = amb.random_element(rng), amb.random_element(rng)
    assert amb.contains(a @ b, tol=1e-12)
    assert amb.contains(adjoint(a), tol=1e-12)


@given(dims=dims_strategy, seed=seeds)
@settings(max_examples=30, deadline=None)
def test_star_reverses_products(dims, seed):
    amb = AmbientAlgebra.from_dims(dims)
    rng = np.random.default_rng(seed)
    a, b = amb.random_element(rng), amb.random_element(rng)
    np.testing.assert_allclose(adjoint(a @ b), adjoint(b) @ adjoint(a), atol=1e-10)


@given(seed=seeds)
@settings(max_examples=30, deadline=None)
def test_a_star_a_is_positive(seed):
    rng = np.random.default_rng(seed)
    a = AmbientAlgebra.from_dims((2, 2)).random_element(rng)
    assert is_positive(adjoint(a) @ a, tol=1e-9)


def test_trace_from_fraction_strings():
    amb = AmbientAlgebra.from_dims((2, 3))
    tau = TraceFunctional.from_weights(amb, ["2/13", "3/13"])
    assert tau.weights == (Fraction(2, 13), Fraction(3, 13))
    assert tau(amb.identity()) == pytest.approx(1.0)
    assert tau(amb.matrix_unit(1, 2, 2)) == pytest.approx(3 / 13)
    assert tau.weights_as_text() == ["2/13", "3/13"]


def test_trace_weights_must_be_positive_and_normalized():
    amb = AmbientAlgebra.from_dims((1, 1))
    with pytest.raises(TraceNotFaithful):
        TraceFunctional.from_weights(amb, [1, 0])
    with pytest.raises(SpecError):
        TraceFunctional.from_weights(amb, ["1/3", "1/3"])
    with pytest.raises(ShapeMismatch):
        TraceFunctional.from_weights(amb, [1])


@given(dims=dims_strategy, seed=seeds)
@settings(max_examples=20, deadline=None)
def test_block_weight_traces_are_tracial(dims, seed):
    amb = AmbientAlgebra.from_dims(dims)
    rng = np.random.default_rng(seed)
    raw = rng.uniform(0.5, 2.0, len(dims))
    weights = raw / float(np.dot(raw, dims))
    tau = TraceFunctional.from_weights(amb, weights)
    xs = [amb.random_element(rng) for _ in range(3)]
    assert trace_defect(tau, xs) < 1e-10


def test_tensor_trace_is_normalized():
    amb = AmbientAlgebra.from_dims((1, 2))
    tau = TraceFunctional.normalized(amb).tensor(3)
    assert tau.size == 9
    assert tau(np.eye(9)) == pytest.approx(1.0)
    assert tau.weights == (Fraction(1, 27), Fraction(1, 27))
    assert tau.dims.dims == (3, 6)


def test_null_space_of_rank_one():
    m = np.array([[1.0, 1.0, 0.0]])
    ns = null_space(m)
    assert ns.shape == (3, 2)
    np.testing.assert_allclose(m @ ns, 0, atol=1e-12)
    np.testing.assert_allclose(np.conj(ns.T) @ ns, np.eye(2), atol=1e-12)


def test_orthonormal_rows_drops_dependent_rows():
    rows = np.array([[1.0, 0, 0], [2.0, 0, 0], [0, 1.0, 0]])
    q = orthonormal_rows(rows)
    assert q.shape == (2, 3)
    new = extend_orthonormal(q, np.array([[1.0, 1.0, 0], [0, 0, 5.0]]))
    assert new.shape[0] == 1
    np.testing.assert_allclose(np.abs(new[0]), [0, 0, 1], atol=1e-12)


@pytest.mark.parametrize("bad", [["a"], "22", 5, None, [2, "3"], [2.5]])
def test_dimension_vector_rejects_non_integer_input(bad):
    with pytest.raises(SpecError):
        DimensionVector(bad)


def test_as_int():
    assert as_int(3, "k") == 3
    assert as_int(4.0, "k", 1) == 4
    for bad in ["3", 1.5, True, None]:
        with pytest.raises(SpecError):
            as_int(bad, "k")
    with pytest.raises(SpecError):
        as_int(0, "k", 1)


def test_null_space_of_complex_rank_deficient_matrix():
    rng = np.random.default_rng(7)
    left = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    right = rng.standard_normal((2, 6)) + 1j * rng.standard_normal((2, 6))
    m = left @ right
    ns = null_space(m)
    assert ns.shape == (6, 4)
    np.testing.assert_allclose(m @ ns, 0, atol=1e-10)
    np.testing.assert_allclose(np.conj(ns.T) @ ns, np.eye(4), atol=1e-10)
    assert orthonormal_rows(m).shape == (2, 6)


def test_null_space_of_negligible_matrix_is_everything():
    ns = null_space(np.full((2, 3), 1e-12))
    np.testing.assert_allclose(ns, np.eye(3))
    assert orthonormal_rows(np.zeros((2, 3))).shape == (0, 3)
