import numpy as np
import pytest

from errors import NotSubalgebra, NotUnital, ShapeMismatch, SpecError
from inclusion import (
    ConcreteAlgebra,
    UnitalInclusion,
    block_structure,
    center,
    inclusion_matrix,
    intersect,
    is_irreducible,
    join,
    relative_commutant,
    subalgebra_from_generators,
    subspace_distance,
    trace_from_block_weights,
)
from instances import (
    diagonal_inclusion,
    factor_tensor_inclusion,
    group_algebra,
    group_algebra_inclusion,
    left_factor,
    right_factor,
    scalar_inclusion,
    symmetric_group,
)
from multimatrix import AmbientAlgebra, DimensionVector

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_full_algebra_dimension():
    alg = ConcreteAlgebra.full(AmbientAlgebra.from_dims((2, 3)))
    assert alg.dim == 13
    assert alg.has_unit()
    assert alg.verify()


def test_generated_by_hermitian_matrix_is_commutative():
    alg = subalgebra_from_generators(2, [SIGMA_X])
    assert alg.dim == 2
    assert alg.contains(SIGMA_X)


def test_generated_by_matrix_unit_includes_adjoint():
    e01 = np.zeros((2, 2))
    e01[0, 1] = 1.0
    alg = subalgebra_from_generators(2, [e01])
    assert alg.dim == 4


def test_no_generators_gives_scalars():
    assert subalgebra_from_generators(3, []).dim == 1


def test_inclusion_preconditions():
    full2 = ConcreteAlgebra.full(2)
    with pytest.raises(ShapeMismatch):
        UnitalInclusion(ConcreteAlgebra.scalars(3), full2)
    with pytest.raises(NotSubalgebra):
        UnitalInclusion(full2, subalgebra_from_generators(2, [SIGMA_X]))
    e00 = np.diag([1.0, 0.0])
    corner = ConcreteAlgebra.from_spanning([e00], 2)
    with pytest.raises(NotUnital):
        UnitalInclusion(corner, full2)


def test_s3_block_structure():
    s3 = symmetric_group(3)
    alg = group_algebra(s3, frozenset(range(6)))
    bs = block_structure(alg)
    assert bs.dims.dims == (1, 1, 2)
    assert bs.multiplicities == (1, 1, 2)
    np.testing.assert_allclose(np.conj(bs.unitary.T) @ bs.unitary, np.eye(6), atol=1e-10)


def test_block_structure_round_trip():
    alg = ConcreteAlgebra.full(AmbientAlgebra.from_dims((1, 2)))
    bs = block_structure(alg)
    x = alg.random_element(np.random.default_rng(3))
    rebuilt = sum(bs.embed(bs.compress(x, j), j) for j in range(len(bs.dims)))
    np.testing.assert_allclose(rebuilt, x, atol=1e-10)


def test_inclusion_matrix_scalar_case():
    inc, _ = scalar_inclusion(DimensionVector((2, 3)))
    lam = inclusion_matrix(inc)
    assert lam.as_lists() == [[2, 3]]
    np.testing.assert_array_equal(lam.gram(), [[4, 6], [6, 9]])


def test_inclusion_matrix_factor_and_diagonal():
    inc, _ = factor_tensor_inclusion(2, 2)
    assert inclusion_matrix(inc).as_lists() == [[2]]
    inc, _ = diagonal_inclusion(2, 3)
    assert inclusion_matrix(inc).as_lists() == [[1, 1, 1]]


def test_relative_commutant_of_tensor_factor():
    inc, _ = factor_tensor_inclusion(2, 2)
    rel = relative_commutant(inc.sub, inc.sup)
    assert rel.dim == 4
    assert subspace_distance(rel, right_factor(2, 2)) < 1e-10
    assert not is_irreducible(inc)


def test_center_counts_blocks():
    alg = ConcreteAlgebra.full(AmbientAlgebra.from_dims((1, 2, 1)))
    assert center(alg).dim == 3


def test_equal_algebras_are_irreducible_when_simple():
    full = ConcreteAlgebra.full(3)
    assert is_irreducible(UnitalInclusion(full, full))


def test_meet_and_join_of_transposition_subgroups():
    s3 = symmetric_group(3)
    a = group_algebra(s3, s3.generated(["(12)"]))
    b = group_algebra(s3, s3.generated(["(13)"]))
    assert intersect(a, b).dim == 1
    assert join(a, b).dim == 6


def test_commuting_square_factors():
    left, right = left_factor(2, 2), right_factor(2, 2)
    assert intersect(left, right).dim == 1
    assert join(left, right).dim == 16


def test_subspace_distance():
    full = ConcreteAlgebra.full(2)
    assert subspace_distance(full, full) < 1e-12
    assert subspace_distance(full, ConcreteAlgebra.scalars(2)) == 1.0


def test_group_inclusion_contains_sub():
    s3 = symmetric_group(3)
    inc, tau = group_algebra_inclusion(s3, s3.generated(["(123)"]))
    assert inc.sub.dim == 3
    assert inc.sup.dim == 6
    assert tau(np.eye(6)) == pytest.approx(1.0)


def test_trace_from_block_weights_normalization():
    inc, _ = scalar_inclusion(DimensionVector((1, 2)))
    bs = block_structure(inc.sup)
    tau = trace_from_block_weights(bs, [0.2, 0.4])
    assert tau(np.eye(3)) == pytest.approx(1.0)
    with pytest.raises(SpecError):
        trace_from_block_weights(bs, [0.5, 0.5])


def test_block_structure_with_multiplicities_round_trip():
    s4 = symmetric_group(4)
    alg = group_algebra(s4, frozenset(range(24)))
    bs = block_structure(alg)
    assert sorted(bs.dims.dims) == [1, 1, 2, 3, 3]
    assert bs.multiplicities == bs.dims.dims
    np.testing.assert_allclose(np.conj(bs.unitary.T) @ bs.unitary, np.eye(24), atol=1e-9)
    x = alg.random_element(np.random.default_rng(5))
    rebuilt = sum(bs.embed(bs.compress(x, j), j) for j in range(len(bs.dims)))
    np.testing.assert_allclose(rebuilt, x, atol=1e-9)
