import numpy as np
import pytest

from basic_construction import (
    a1_dimension,
    basic_construction,
    dual_expectation,
    dual_index_check,
    gns,
    higher_commutant,
    jones_compression_residual,
    jones_projection,
    pushdown_residual,
)
from errors import IndexNotScalar, NotSubalgebra
from expectation import check_expectation
from inclusion import ConcreteAlgebra, inclusion_matrix, subalgebra_from_generators
from instances import (
    build_instance,
    default_suite,
    factor_tensor_inclusion,
    group_algebra_inclusion,
    scalar_inclusion,
    symmetric_group,
)
from multimatrix import AmbientAlgebra, DimensionVector, TraceFunctional


@pytest.fixture(scope="module")
def c_in_m2():
    inc, tau = scalar_inclusion(DimensionVector((2,)))
    return basic_construction(inc, tau)


@pytest.fixture(scope="module")
def m2_in_m4():
    inc, tau = factor_tensor_inclusion(2, 2)
    return basic_construction(inc, tau)


def test_gns_basis_is_orthonormal():
    inc, tau = scalar_inclusion(DimensionVector((1, 2)))
    g = gns(inc.sup, tau)
    assert g.dim == 5
    assert g.orthonormality_residual() < 1e-12


def test_left_representation_is_multiplicative():
    amb = AmbientAlgebra.from_dims((2,))
    g = gns(ConcreteAlgebra.full(amb), TraceFunctional.normalized(amb))
    rng = np.random.default_rng(1)
    a, b = amb.random_element(rng), amb.random_element(rng)
    np.testing.assert_allclose(g.left_rep(a @ b), g.left_rep(a) @ g.left_rep(b), atol=1e-10)
    np.testing.assert_allclose(g.right_rep(a @ b), g.right_rep(b) @ g.right_rep(a), atol=1e-10)


def test_basic_construction_of_scalars_in_m2(c_in_m2):
    bc = c_in_m2
    assert bc.a1.dim == 16
    assert bc.e.rank == 1
    assert bc.index.scalar == pytest.approx(4.0)
    for name in ("unit_criterion", "markov_identity", "jones_projection", "span_distance", "commutant_of_right_b"):
        assert bc.checks[name] < 1e-8, name


def test_basic_construction_of_tensor_factor(m2_in_m4):
    bc = m2_in_m4
    assert bc.a1.dim == 64
    assert bc.e.rank == 4
    assert jones_compression_residual(bc) < 1e-8
    assert pushdown_residual(bc) < 1e-8


def test_dual_expectation_sends_e_to_inverse_index(c_in_m2):
    bc = c_in_m2
    e1 = dual_expectation(bc)
    assert check_expectation(e1, tol=1e-8)
    np.testing.assert_allclose(e1.apply(bc.e.matrix), np.eye(4) / 4, atol=1e-8)
    assert bc.checks["dual_formula_agreement"] < 1e-8


@pytest.mark.parametrize("fixture", ["c_in_m2", "m2_in_m4"])
def test_dual_index_equals_index(fixture, request):
    result = dual_index_check(request.getfixturevalue(fixture))
    assert result.equal
    assert result.residual < 1e-8
    assert result.dual_index.norm == pytest.approx(4.0, abs=1e-7)


def test_dual_index_needs_scalar_index():
    inc, _ = scalar_inclusion(DimensionVector((1, 2)))
    tau = TraceFunctional.normalized(AmbientAlgebra.from_dims((1, 2)))
    bc = basic_construction(inc, tau, build_algebra=False)
    assert bc.a1 is None
    with pytest.raises(IndexNotScalar):
        dual_index_check(bc)


def test_higher_commutant_dimensions(c_in_m2, m2_in_m4):
    comm, structure = higher_commutant(c_in_m2.inclusion, c_in_m2)
    assert comm.dim == 16
    assert structure.dims.dims == (4,)
    comm, structure = higher_commutant(m2_in_m4.inclusion, m2_in_m4)
    assert comm.dim == 16
    assert structure.dims.dims == (4,)


def test_higher_commutant_of_group_pair():
    s3 = symmetric_group(3)
    inc, tau = group_algebra_inclusion(s3, s3.generated([]))
    bc = basic_construction(inc, tau)
    comm, structure = higher_commutant(inc, bc)
    assert comm.dim == 36
    assert structure.dims.dims == (6,)


def test_jones_projection_needs_a_subalgebra():
    amb = AmbientAlgebra.from_dims((1, 1))
    g = gns(ConcreteAlgebra.full(amb), TraceFunctional.normalized(amb))
    sigma_x = np.array([[0, 1], [1, 0]], dtype=complex)
    with pytest.raises(NotSubalgebra):
        jones_projection(g, subalgebra_from_generators(2, [sigma_x]))


@pytest.mark.parametrize("desc", default_suite(), ids=lambda d: d.name)
def test_basic_construction_on_default_suite(desc):
    inc, tau = build_instance(desc)
    bc = basic_construction(inc, tau)
    assert bc.checks["commutant_of_right_b"] < 1e-8
    assert bc.a1.dim == a1_dimension(inclusion_matrix(inc))
    if not bc.index.is_scalar:
        with pytest.raises(IndexNotScalar):
            dual_index_check(bc)
        return
    result = dual_index_check(bc)
    assert result.equal
    assert result.residual < 1e-8
    assert result.dual_index.norm == pytest.approx(bc.index.scalar, abs=1e-7)
    assert bc.checks["dual_formula_agreement"] < 1e-8
