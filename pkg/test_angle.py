import math

import numpy as np
import pytest

from angle import (
    RIGIDITY_THRESHOLD,
    a_norm,
    a_valued_inner,
    angle,
    cauchy_schwarz_check,
    meet_projection_check,
    minimal_elements,
    rigidity_report,
)
from basic_construction import basic_construction
from errors import DegenerateIntermediate, NotInBasicConstruction, NotIntermediate
from expectation import trace_preserving_expectation
from instances import (
    build_instance,
    default_angle_suite,
    default_suite,
    factor_tensor_inclusion,
    group_algebra,
    group_algebra_inclusion,
    group_intermediates,
    symmetric_group,
)


def _pairs():
    return {p.name: p for p in default_angle_suite()}


EXPECTED_COS = {
    "M4 commuting square": 0.0,
    "M4 self pair": 1.0,
    "S3 (12),(13)": 0.0,
    "S3 (12),(123)": 0.0,
    "S3 (123),S3": 2 / math.sqrt(10),
    "Z4 <2>,Z4": 1 / math.sqrt(3),
    "Z2xZ2 axes": 0.0,
}


@pytest.mark.parametrize("name", sorted(EXPECTED_COS))
def test_angle_suite_closed_forms(name):
    p = _pairs()[name]
    report = angle(p.inclusion, p.c, p.d, p.trace)
    assert report.cos_value == pytest.approx(EXPECTED_COS[name], abs=1e-9)
    assert report.angle == pytest.approx(math.acos(EXPECTED_COS[name]), abs=1e-6)


def test_transposition_against_whole_group():
    s3 = symmetric_group(3)
    inc, tau = group_algebra_inclusion(s3, s3.generated([]))
    c = group_algebra(s3, s3.generated(["(12)"]))
    report = angle(inc, c, inc.sup, tau)
    assert report.angle == pytest.approx(1.1071487177940904, abs=1e-9)
    assert report.to_dict()["pair"] == [c.label, inc.sup.label]


def test_self_angle_is_exactly_zero():
    p = _pairs()["M4 self pair"]
    report = angle(p.inclusion, p.c, p.c, p.trace)
    assert report.cos_value == 1.0
    assert report.angle == 0.0


def test_angle_is_symmetric():
    p = _pairs()["S3 (123),S3"]
    a = angle(p.inclusion, p.c, p.d, p.trace)
    b = angle(p.inclusion, p.d, p.c, p.trace)
    assert a.angle == pytest.approx(b.angle, abs=1e-12)


def test_degenerate_and_non_intermediate_inputs():
    s3 = symmetric_group(3)
    inc, tau = group_algebra_inclusion(s3, s3.generated(["(12)"]))
    with pytest.raises(DegenerateIntermediate):
        angle(inc, inc.sub, inc.sup, tau)
    with pytest.raises(NotIntermediate):
        angle(inc, group_algebra(s3, s3.generated(["(13)"])), inc.sup, tau)


def test_a_valued_inner_product():
    inc, tau = factor_tensor_inclusion(2, 2)
    bc = basic_construction(inc, tau, build_algebra=False)
    e = bc.e.matrix
    np.testing.assert_allclose(a_valued_inner(bc.dual, e, e), np.eye(16) / 4, atol=1e-10)
    assert a_norm(bc.dual, e) == pytest.approx(0.5)
    rng = np.random.default_rng(0)
    outside = rng.standard_normal((16, 16))
    with pytest.raises(NotInBasicConstruction):
        a_valued_inner(bc.dual, outside, e)


def test_cauchy_schwarz_holds():
    p = _pairs()["S3 (12),(13)"]
    bc = basic_construction(p.inclusion, p.trace, build_algebra=False)
    assert cauchy_schwarz_check(bc.expectation, samples=200) <= 1e-9


@pytest.mark.parametrize("name", ["M4 commuting square", "S3 (12),(13)", "S3 (123),S3", "Z4 <2>,Z4", "Z2xZ2 axes"])
def test_meet_of_jones_projections(name):
    p = _pairs()[name]
    check = meet_projection_check(p.inclusion, p.c, p.d, p.trace)
    assert check.difference < 1e-8
    assert check.passed


def test_rigidity_on_s3():
    s3 = symmetric_group(3)
    h = s3.generated([])
    inc, tau = group_algebra_inclusion(s3, h)
    family = group_intermediates(s3, h)
    minimal = minimal_elements(inc, family)
    assert len(minimal) == 4
    assert "S3" not in minimal

    report = rigidity_report(inc, family, tau)
    assert len(report.pairs) == 6
    assert all(pair["above_threshold"] for pair in report.pairs)
    assert all(pair["angle"] > RIGIDITY_THRESHOLD for pair in report.pairs)
    assert not report.applicable
    assert "B′∩A is not the scalars" in report.reasons


@pytest.mark.parametrize("desc", default_suite(), ids=lambda d: d.name)
def test_cauchy_schwarz_on_default_suite(desc):
    inc, tau = build_instance(desc)
    e = trace_preserving_expectation(inc.sup, inc.sub, tau)
    assert cauchy_schwarz_check(e, samples=1000, seed=11) <= 1e-9
