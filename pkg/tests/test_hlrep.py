import numpy as np
import pytest

from hlqg.hlrep import (
    HLQuadruple,
    build_invertible_gamma,
    build_zero_gamma,
    check_asa1_smearing,
    check_relations,
    check_shift_identity,
    check_star_sum_identity,
    check_sumt_expansion,
    classical_matrix,
    classical_point,
    direct_sum,
    normality_defect,
    shift_coefficient,
    tensor,
)


@pytest.fixture(scope="module")
def inv():
    return build_invertible_gamma(1.0, 1.0, 16, 8)


@pytest.fixture(scope="module")
def zero():
    return build_zero_gamma(2.0, 1.0, 16, 8)


def _assert_report(rep):
    bad = [(e.name, e.residual, e.classification) for e in rep.entries if not e.passed]
    assert not bad, bad


def test_invertible_relations(inv):
    rep = check_relations(inv)
    _assert_report(rep)
    names = rep.by_name()
    assert names["cb=ad-1"].classification == "exact"


@pytest.mark.parametrize("c", [1.0, 0.5 + 0.5j, -2j])
def test_invertible_relations_general_c(c):
    _assert_report(check_relations(build_invertible_gamma(c, 0.7, 14, 6)))


def test_zero_relations(zero):
    _assert_report(check_relations(zero))
    assert normality_defect(zero) == 0.0


def test_zero_gamma_classical_limit():
    q = build_zero_gamma(1.0, 0.0, 4, b0=3.0)
    _assert_report(check_relations(q))


def test_direct_sum_relations(zero, inv):
    q = direct_sum(zero, inv)
    assert q.dim == zero.dim + inv.dim
    _assert_report(check_relations(q))


def test_direct_sum_order_enforced(zero, inv):
    with pytest.raises(ValueError):
        direct_sum(inv, zero)


def test_tensor_relations():
    q = build_invertible_gamma(1.0, 1.0, 16, 8)
    qp = build_invertible_gamma(1.0, 1.0, 16, 8)
    t = tensor(q, qp)
    assert t.dim == 16 ** 4 and t.P == 8 ** 4
    _assert_report(check_relations(t))


def test_classical_product_is_matrix_product():
    g = (2, 1 + 1j, 1, (2 + 1j) / 2)
    h = (1, -0.5, 3j, 1 - 1.5j)
    q = tensor(classical_point(*g), classical_point(*h))
    expected = np.array(g).reshape(2, 2) @ np.array(h).reshape(2, 2)
    assert np.allclose(classical_matrix(q), expected, atol=1e-14)
    _assert_report(check_relations(q))


def test_classical_point_rejects_bad_determinant():
    with pytest.raises(ValueError):
        classical_point(1, 1, 1, 1)


def test_builders_reject_degenerate_input():
    with pytest.raises(ValueError):
        build_invertible_gamma(0.0, 1.0, 8)
    with pytest.raises(ValueError):
        build_invertible_gamma(1.0, 0.0, 8)
    with pytest.raises(ValueError):
        build_zero_gamma(1.0, 1.0, 8)


def test_shift_identity_unit_parameters():
    q = build_invertible_gamma(1.0, 1.0, 24)
    res = check_shift_identity(tensor(q, q), 0.5)
    assert res.kappa == pytest.approx(1.0)
    assert res.residual < 1e-3
    assert res.residual_literal == pytest.approx(res.residual)


def test_shift_coefficient_general():
    q = build_invertible_gamma(0.8 + 0.3j, 0.6, 24)
    qp = build_invertible_gamma(1.2 - 0.5j, 0.6, 24)
    res = check_shift_identity(tensor(q, qp), 0.4)
    assert res.residual < 1e-3
    # the bare conj(z) shift only works when kappa = 1
    assert abs(res.kappa - 1) > 0.1
    assert res.residual_literal > 0.05


def test_shift_coefficient_formula():
    assert shift_coefficient(1.0, 1.0, 1.0) == pytest.approx(1.0)
    assert shift_coefficient(2.0, 1j, 1j) == pytest.approx(-2.0)


def test_star_sum(inv):
    assert check_star_sum_identity(inv) < 1e-10


@pytest.mark.parametrize("form", ["exact", "exact_dual"])
def test_sumt_expansion(inv, form):
    assert check_sumt_expansion(inv, form) < 1e-6


@pytest.mark.xfail(strict=True, reason="mixed-order last term does not match the product")
def test_sumt_expansion_mixed_order(inv):
    assert check_sumt_expansion(inv, "literal") < 1e-6


def test_sumt_unknown_form(inv):
    with pytest.raises(ValueError):
        check_sumt_expansion(inv, "other")


def test_asa1_smearing(inv):
    assert check_asa1_smearing(inv) < 1e-3


def test_with_probe_keeps_matrices(inv):
    q = inv.with_probe([0, 1])
    assert isinstance(q, HLQuadruple) and q.P == 2 and q.A is inv.A
