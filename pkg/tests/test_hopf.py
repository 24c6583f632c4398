import time

import pytest

from hlqg import hopf
from hlqg.hopf import GROUPS, check_hopf_axioms, delta, epsilon, kappa
from hlqg.ncalg import A, AS, B, BS, C, CS, D, DS, NCPoly, TensorPoly, adjoint, normal_form
from hlqg.parser import parse
from hlqg.scalars import SCoeff


def gen(x):
    return NCPoly.gen(x)


def test_delta_examples():
    assert delta(gen(C)) == TensorPoly.pure(gen(C), gen(A)) + TensorPoly.pure(gen(D), gen(C))
    assert delta(NCPoly.const(1)) == TensorPoly.one(2)
    assert delta(parse("a*d - b*c - 1")).is_zero()
    assert delta(gen(C)).to_str() == "(c (x) a) + (d (x) c)"


def test_kappa_examples():
    assert kappa(gen(B)) == -gen(B)
    assert kappa(kappa(gen(A))) == gen(A)
    assert kappa(gen(A) * gen(B)) == -(gen(B) * gen(D))


def test_epsilon_examples():
    assert epsilon(gen(A)) == SCoeff.const(1)
    assert epsilon(gen(A) * gen(D) - gen(B) * gen(C)) == SCoeff.const(1)
    assert epsilon(gen(CS) * gen(B)).is_zero()


def test_antipode_on_alpha():
    m = delta(gen(A)).leg_map(0, kappa).multiply_legs()
    assert m == NCPoly.const(1)


def test_counit_on_gamma():
    t = delta(gen(C))
    out = NCPoly.zero()
    for (m0, m1), c in t.terms().items():
        out = out + NCPoly.mono(m1) * (c * epsilon(NCPoly.mono(m0)))
    assert out == gen(C)


def test_full_battery():
    t0 = time.perf_counter()
    rep = check_hopf_axioms()
    assert time.perf_counter() - t0 < 10
    assert rep.passed, [c.name for c in rep.failures()]
    groups = rep.groups()
    assert set(groups) == set(GROUPS)
    # every generator appears in every non-relation group
    for g in GROUPS[1:]:
        targets = {c.target for c in groups[g]}
        assert {"a", "b", "c", "d", "a'", "b'", "c'", "d'"} <= targets
    assert len(groups["well-definedness"]) == 90


def test_classical_specialization():
    assert check_hopf_axioms(n_random=5, s_value=0).passed


def test_star_compatibility_is_not_tautological(monkeypatch):
    # corrupt the starred row of delta: the *-compatibility group must notice
    table = dict(hopf.DELTA_TABLE)
    table[BS] = ((AS, BS), (BS, CS))
    monkeypatch.setattr(hopf, "DELTA_TABLE", table)
    hopf._delta_letter.cache_clear()
    hopf._delta_mono.cache_clear()
    try:
        rep = check_hopf_axioms(n_random=0)
        failed = {c.group for c in rep.failures()}
        assert "star-compatibility" in failed
    finally:
        hopf._delta_letter.cache_clear()
        hopf._delta_mono.cache_clear()


def test_broken_kappa_is_caught(monkeypatch):
    table = dict(hopf.KAPPA_TABLE)
    table[B] = (1, B)
    monkeypatch.setattr(hopf, "KAPPA_TABLE", table)
    hopf._kappa_mono.cache_clear()
    try:
        rep = check_hopf_axioms(n_random=0)
        assert not rep.passed
        assert "antipode" in {c.group for c in rep.failures()}
    finally:
        hopf._kappa_mono.cache_clear()


@pytest.mark.parametrize("g", range(8))
def test_delta_is_star_homomorphism_on_generators(g):
    x = gen(g)
    assert delta(adjoint(x)) == delta(x).adjoint()


def test_delta_multiplicative():
    x, y = parse("a*b' + s*c"), parse("d*a' - 2")
    assert delta(x * y) == delta(x) * delta(y)
    assert normal_form(x * y) == x * y
