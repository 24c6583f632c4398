from fractions import Fraction

import pytest
from hypothesis import given

from hlqg.scalars import GaussQ, SCoeff

from strategies import gaussq, nonzero_gaussq, scoeffs


def test_to_str_forms():
    assert GaussQ(Fraction(1, 2), Fraction(3, 2)).to_str() == "1/2+3/2*i"
    assert GaussQ(0, -1).to_str() == "-i"
    assert GaussQ(3).to_str() == "3"
    assert SCoeff({0: 1, 2: GaussQ(0, 2)}).to_str() == "2*i*s^2 + 1"


@given(gaussq, gaussq, gaussq)
def test_field_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x


@given(nonzero_gaussq)
def test_inverse(x):
    assert x * x.inverse() == GaussQ(1)


def test_zero_inverse_rejected():
    with pytest.raises(ZeroDivisionError):
        GaussQ(0).inverse()


@given(gaussq, gaussq)
def test_conj_is_multiplicative(x, y):
    assert (x * y).conj() == x.conj() * y.conj()


@given(scoeffs, scoeffs)
def test_scoeff_evaluation_is_a_homomorphism(p, q):
    s = 0.7
    assert abs((p * q).evaluate(s) - p.evaluate(s) * q.evaluate(s)) < 1e-9
    assert abs((p + q).evaluate(s) - p.evaluate(s) - q.evaluate(s)) < 1e-9


@given(scoeffs)
def test_no_stored_zeros(p):
    assert all(c for _, c in p.items())
    assert (p - p).is_zero()
