"""Hypothesis strategies shared by the test modules."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from hlqg.ncalg import NCPoly, SCoeff, word_poly
from hlqg.scalars import GaussQ

fractions = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5))
gaussq = st.builds(GaussQ, fractions, fractions)
nonzero_gaussq = gaussq.filter(bool)
scoeffs = st.dictionaries(st.integers(0, 2), gaussq, max_size=3).map(SCoeff)
words = st.lists(st.integers(0, 7), max_size=4).map(tuple)


@st.composite
def polys(draw, max_terms: int = 3, max_degree: int = 3):
    n = draw(st.integers(0, max_terms))
    out = NCPoly.zero()
    for _ in range(n):
        w = draw(st.lists(st.integers(0, 7), max_size=max_degree).map(tuple))
        out = out + word_poly(w) * draw(scoeffs)
    return out


small_complex = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
