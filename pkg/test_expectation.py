from fractions import Fraction

import numpy as np
import pytest

from errors import TraceNotFaithful
from expectation import (
    check_expectation,
    compatibility_check,
    minimal_index_search,
    pp_constant,
    probabilistic_index,
    quasi_basis,
    reconstruction_residual,
    trace_preserving_expectation,
    verify_expectation,
    watatani_index,
)
from inclusion import ConcreteAlgebra
from instances import (
    build_instance,
    default_suite,
    diagonal_inclusion,
    direct_sum_inclusion,
    factor_tensor_inclusion,
    group_algebra,
    group_algebra_inclusion,
    scalar_inclusion,
    symmetric_group,
)
from multimatrix import AmbientAlgebra, DimensionVector, TraceFunctional


def _expectation(inc, tau):
    return trace_preserving_expectation(inc.sup, inc.sub, tau)


def test_expectation_onto_scalars_is_the_trace():
    inc, tau = scalar_inclusion(DimensionVector((2,)))
    e = _expectation(inc, tau)
    e00 = np.diag([1.0, 0.0])
    np.testing.assert_allclose(e.apply(e00), 0.5 * np.eye(2), atol=1e-12)


@pytest.mark.parametrize("build", [lambda: factor_tensor_inclusion(2, 2), lambda: diagonal_inclusion(2, 2)])
def test_expectation_axioms(build):
    inc, tau = build()
    e = _expectation(inc, tau)
    assert check_expectation(e)
    assert max(verify_expectation(e).values()) < 1e-9


@pytest.mark.parametrize("desc", default_suite(), ids=lambda d: d.name)
def test_index_on_default_suite(desc):
    inc, tau = build_instance(desc)
    e = _expectation(inc, tau)
    qb = quasi_basis(e)
    assert reconstruction_residual(qb) <= 1e-8
    index = watatani_index(qb)
    assert index.residuals["independence"] <= 1e-8
    assert index.norm == pytest.approx(desc.expected["index"], abs=1e-8)


def test_non_scalar_index_block_values():
    inc, _ = scalar_inclusion(DimensionVector((2, 3)))
    tau = TraceFunctional.normalized(AmbientAlgebra.from_dims((2, 3)))
    index = watatani_index(quasi_basis(_expectation(inc, tau)))
    assert not index.is_scalar
    assert index.block_values == pytest.approx((10.0, 15.0), abs=1e-7)
    assert index.norm == pytest.approx(15.0)


def test_shuffled_pivot_gives_same_index():
    s3 = symmetric_group(3)
    inc, tau = group_algebra_inclusion(s3, s3.generated(["(12)"]))
    e = _expectation(inc, tau)
    a = watatani_index(quasi_basis(e)).element
    b = watatani_index(quasi_basis(e, pivot="shuffle", seed=7)).element
    np.testing.assert_allclose(a, b, atol=1e-8)
    np.testing.assert_allclose(a, 3 * np.eye(6), atol=1e-8)


def test_unfaithful_trace_is_rejected():
    full = ConcreteAlgebra.full(2)
    tau = TraceFunctional.from_density(np.diag([1.0, 0.0]))
    with pytest.raises(TraceNotFaithful):
        trace_preserving_expectation(full, ConcreteAlgebra.scalars(2), tau)


def test_compatibility_with_intermediate():
    s3 = symmetric_group(3)
    inc, tau = group_algebra_inclusion(s3, s3.generated([]))
    c = group_algebra(s3, s3.generated(["(12)"]))
    assert compatibility_check(inc.sup, inc.sub, c, tau) < 1e-10


@pytest.mark.parametrize("dims", [(2,), (1, 1), (2, 3), (1, 2, 2)])
def test_pp_constant_matches_smallest_markov_weight(dims):
    inc, tau = scalar_inclusion(DimensionVector(dims))
    pp = pp_constant(_expectation(inc, tau), samples=200, refine_steps=20)
    total = sum(n * n for n in dims)
    assert pp.value == pytest.approx(min(dims) / total, abs=1e-6)


def test_probabilistic_index_of_matrix_algebra():
    inc, tau = scalar_inclusion(DimensionVector((3,)))
    assert probabilistic_index(_expectation(inc, tau), samples=200, refine_steps=20) == pytest.approx(3.0, abs=1e-5)


def test_minimal_index_scalar_regime():
    inc, _ = scalar_inclusion(DimensionVector((2, 3)))
    result = minimal_index_search(inc)
    assert result.regime == "exact-scalar"
    assert result.value == pytest.approx(13.0)
    assert result.weights == (Fraction(2, 13), Fraction(3, 13))
    assert result.formula_residual < 1e-7


def test_minimal_index_factor_regime():
    inc, _ = factor_tensor_inclusion(2, 2)
    result = minimal_index_search(inc)
    assert result.regime == "exact-factor"
    assert result.value == pytest.approx(4.0)
    inc, _ = direct_sum_inclusion((1, 1))
    assert minimal_index_search(inc).value == pytest.approx(2.0)


def test_minimal_index_heuristic_regime():
    inc, _ = diagonal_inclusion(2, 2)
    result = minimal_index_search(inc, restarts=3)
    assert result.regime == "heuristic"
    assert result.value == pytest.approx(2.0, abs=1e-6)
    assert result.weights == pytest.approx((0.25, 0.25), abs=1e-5)
    assert result.formula_residual < 1e-6


def test_minimal_index_search_reaches_the_spectral_radius():
    s3 = symmetric_group(3)
    inc, tau = group_algebra_inclusion(s3, s3.generated(["(12)"]))
    result = minimal_index_search(inc, restarts=3)
    assert result.regime == "heuristic"
    assert result.converged
    assert result.optimality_gap < 1e-6
    assert result.value <= watatani_index(quasi_basis(_expectation(inc, tau))).norm + 1e-7


def test_exact_regimes_have_no_optimality_gap():
    for inc, _ in (scalar_inclusion(DimensionVector((1, 2, 3))), factor_tensor_inclusion(2, 3)):
        result = minimal_index_search(inc)
        assert result.converged
        assert result.optimality_gap == pytest.approx(0.0, abs=1e-9)
