import numpy as np
import pytest

import config
import tensor
from errors import NotIntermediate, SpecError, TensorSizeExceeded
from inclusion import subspace_distance
from instances import (
    default_angle_suite,
    factor_tensor_inclusion,
    left_factor,
    scalar_inclusion,
)
from multimatrix import DimensionVector
from tensor import (
    commutant_stability,
    detensor,
    stability_check,
    tensor_algebra,
    tensor_basic_check,
    tensor_inclusion,
)


def _pairs():
    return {p.name: p for p in default_angle_suite()}


@pytest.fixture(scope="module")
def c_in_m2_tensored():
    inc, tau = scalar_inclusion(DimensionVector((2,)))
    return tensor_inclusion(inc, tau, 2)


def test_tensor_algebra_dimension():
    c = left_factor(2, 2)
    big = tensor_algebra(c, 3)
    assert big.size == 12
    assert big.dim == 36
    assert big.verify()


def test_index_is_unchanged_by_tensoring(c_in_m2_tensored):
    ti = c_in_m2_tensored
    assert ti.base_index.scalar == pytest.approx(4.0)
    assert ti.tensored_index.scalar == pytest.approx(4.0)
    assert ti.checks["lifted_reconstruction"] < 1e-8
    assert ti.checks["index_tensor_identity"] < 1e-8
    assert ti.checks["index_norm_difference"] < 1e-8


def test_tensor_factor_must_be_at_least_two():
    inc, tau = scalar_inclusion(DimensionVector((2,)))
    with pytest.raises(SpecError):
        tensor_inclusion(inc, tau, 1)


def test_tensor_size_cap(monkeypatch):
    inc, tau = factor_tensor_inclusion(2, 2)
    monkeypatch.setattr(config, "MAX_TENSOR_GNS_DIM", 32)
    with pytest.raises(TensorSizeExceeded):
        tensor_inclusion(inc, tau, 2)


def test_detensor_recovers_intermediate():
    inc, tau = scalar_inclusion(DimensionVector((4,)))
    ti = tensor_inclusion(inc, tau, 2)
    c = left_factor(2, 2)
    small = detensor(tensor_algebra(c, 2), ti)
    assert small.dim == 4
    assert subspace_distance(small, c) < 1e-8
    assert detensor(ti.tensored.sup, ti).dim == 16


def test_detensor_rejects_non_intermediates():
    inc, tau = factor_tensor_inclusion(2, 2)
    ti = tensor_inclusion(inc, tau, 2)
    with pytest.raises(NotIntermediate):
        detensor(tensor_algebra(left_factor(1, 4), 2), ti)


def test_relative_commutant_is_stable(c_in_m2_tensored):
    assert commutant_stability(c_in_m2_tensored) < 1e-8


def test_basic_construction_of_tensored_inclusion(c_in_m2_tensored):
    distance, passed = tensor_basic_check(c_in_m2_tensored)
    assert passed
    assert distance < 1e-7
    assert c_in_m2_tensored.checks["jones_projection_difference"] < 1e-7


def test_basic_construction_check_size_cap(monkeypatch):
    inc, tau = scalar_inclusion(DimensionVector((4,)))
    ti = tensor_inclusion(inc, tau, 2)
    monkeypatch.setattr(config, "MAX_BASIC_CHECK_DIM", 32)
    with pytest.raises(TensorSizeExceeded):
        tensor_basic_check(ti)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("name", ["M4 commuting square", "S3 (12),(13)", "S3 (123),S3", "Z4 <2>,Z4", "Z2xZ2 axes"])
def test_angles_are_stable_under_tensoring(name, m):
    p = _pairs()[name]
    result = stability_check(p.inclusion, p.c, p.d, p.trace, m)
    assert result.difference < 1e-8
    assert result.tensored.cos_value == pytest.approx(result.base.cos_value, abs=1e-8)


@pytest.mark.parametrize("name, m", [("M4 commuting square", 2), ("S3 (12),(13)", 3), ("Z4 <2>,Z4", 3)])
def test_basic_construction_check_on_larger_instances(name, m):
    p = _pairs()[name]
    ti = tensor_inclusion(p.inclusion, p.trace, m)
    distance, passed = tensor_basic_check(ti)
    assert passed
    assert distance < 1e-7
    assert ti.checks["dimension_count_defect"] == 0
    assert ti.checks["right_commutation"] < 1e-7
    assert ti.checks["jones_projection_difference"] < 1e-7


def test_basic_construction_check_detects_a_wrong_identification(monkeypatch):
    inc, tau = scalar_inclusion(DimensionVector((2,)))
    ti = tensor_inclusion(inc, tau, 2)
    real = tensor.gns_identification

    def shuffled(g_base, g_tensored, m):
        return np.roll(real(g_base, g_tensored, m), 1, axis=1)

    monkeypatch.setattr(tensor, "gns_identification", shuffled)
    distance, passed = tensor_basic_check(ti)
    assert not passed
    assert distance > 1e-3


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("name", ["M4 commuting square", "S3 (12),(13)", "S3 (123),S3", "Z4 <2>,Z4", "Z2xZ2 axes"])
def test_detensor_round_trip(name, m):
    p = _pairs()[name]
    ti = tensor_inclusion(p.inclusion, p.trace, m)
    for c in (p.c, p.d):
        assert subspace_distance(detensor(tensor_algebra(c, m), ti), c) < 1e-8
