import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hlqg.slpoly import (
    DEFAULT_CONVENTIONS,
    BorelPoly,
    Conventions,
    CoordPoly,
    DiffOp,
    borel,
    build_op,
    calibrate_conventions,
    coord,
    fields_commute,
    flow_fields,
    l2u_derivative_check,
    random_coordpoly,
    restrict_to_borel,
    verify_determinant_identity,
)


def test_coordinate_reduction():
    assert coord("a") * coord("d") == coord("b") * coord("c") + 1
    assert coord("a~") * coord("d~") == coord("b~") * coord("c~") + 1


def test_flows_commute():
    assert all(fields_commute().values())


@pytest.mark.parametrize("conv", Conventions.all_settings(), ids=lambda c: "{l_sign}{r_sign}{l_slot}{r_slot}".format(**c.as_dict()))
def test_determinant_identity_all_settings(conv):
    assert verify_determinant_identity(conv).passed


def test_determinant_negative_control():
    flipped = DEFAULT_CONVENTIONS.flipped("l_sign")
    res = verify_determinant_identity(DEFAULT_CONVENTIONS, alpha_conventions=flipped)
    assert not res.passed
    assert res.residual.order() == 2


def test_determinant_at_classical_point():
    assert verify_determinant_identity(s_value=0).passed


def test_borel_restriction_of_beta():
    assert restrict_to_borel(build_op("beta")) == build_op("beta0")


def test_borel_restriction_of_polynomials():
    rng = random.Random(11)
    op, op0 = build_op("beta"), build_op("beta0")
    for _ in range(20):
        f = random_coordpoly(rng)
        assert restrict_to_borel(op(f)) == op0(restrict_to_borel(f))


def test_restrict_ad_is_one():
    assert restrict_to_borel(coord("a") * coord("d")) == BorelPoly.const(1)
    assert restrict_to_borel(coord("d")) == borel("a0", -1)


coord_names = st.sampled_from(["a", "b", "c", "d", "a~", "b~", "c~", "d~"])


@st.composite
def coordpolys(draw):
    return random_coordpoly(random.Random(draw(st.integers(0, 10_000))), n_terms=3)


@given(coordpolys(), coordpolys(), st.integers(0, 3))
def test_leibniz(f, g, k):
    v = flow_fields()[k]
    assert v(f * g) == v(f) * g + f * v(g)


@given(coordpolys(), st.sampled_from(["alpha", "delta", "beta"]))
def test_composition_matches_application(f, which):
    op = build_op(which)
    other = build_op("delta")
    assert (op @ other)(f) == op(other(f))


def test_l2u_consistency_and_slope():
    hs = [4e-3, 2e-3, 1e-3]
    res = [l2u_derivative_check(1.0, h=h).residual for h in hs]
    assert res[-1] <= 1e-5
    slope = np.polyfit(np.log(hs), np.log(res), 1)[0]
    assert abs(slope - 2) <= 0.3


def test_calibration_is_unique():
    rows = calibrate_conventions()
    passing = [r.conventions for r in rows if r.passed]
    assert passing == [DEFAULT_CONVENTIONS]
    assert all(r.determinant for r in rows)


def test_evaluate_needs_big_cell():
    with pytest.raises(ValueError):
        coord("b").evaluate(1.0, 0.0, 1.0, 1.0)


def test_evaluate_recovers_b():
    v = coord("b").evaluate(2.0, 1.0, 3.0, 1.0)
    assert v == pytest.approx(5.0)
