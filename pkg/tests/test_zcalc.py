import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hlqg.zcalc import (
    affiliated_product,
    density_surrogate,
    f_fun,
    f_zero_set,
    g_fun,
    inverse_z,
    norm,
    q_matrix,
    roundtrip_error,
    strongly_commute,
    z_transform,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
mats = st.integers(1, 5).flatmap(
    lambda n: st.tuples(arrays(float, (n, n), elements=finite), arrays(float, (n, n), elements=finite))
).map(lambda p: p[0] + 1j * p[1])


def _unitary(rng, n):
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return Q


def _normal_pair(seed=0, n=5):
    rng = np.random.default_rng(seed)
    U = _unitary(rng, n)
    d1 = rng.normal(size=n) + 1j * rng.normal(size=n)
    d2 = rng.normal(size=n) + 1j * rng.normal(size=n)
    return U @ np.diag(d1) @ U.conj().T, U @ np.diag(d2) @ U.conj().T


def test_scalar_example():
    assert z_transform(1.0)[0, 0] == pytest.approx(1 / math.sqrt(2))
    assert inverse_z(1 / math.sqrt(2))[0, 0] == pytest.approx(1.0)


@given(mats)
def test_roundtrip(T):
    assert roundtrip_error(T) <= 1e-10 * max(1.0, norm(T)) ** 3


@given(mats)
def test_z_is_contraction(T):
    assert norm(z_transform(T)) < 1


def test_inverse_rejects_non_contraction():
    with pytest.raises(ValueError):
        inverse_z(np.eye(2))
    with pytest.raises(ValueError):
        inverse_z(np.array([[0.0, 2.0], [0.0, 0.0]]))


def test_strong_commutation_positive_cases():
    T1, T2 = _normal_pair()
    assert strongly_commute(T1, T2)
    H = np.diag([1.0, -2.0, 3.0])
    assert strongly_commute(H, H @ H - 2 * H + 1j * np.eye(3))
    blk1 = np.zeros((4, 4), complex); blk1[:2, :2] = [[1, 2], [0, 3]]
    blk2 = np.zeros((4, 4), complex); blk2[2:, 2:] = [[0, 1], [4, 1]]
    assert strongly_commute(blk1, blk2)


def test_strong_commutation_negative_cases():
    L = np.diag(np.sqrt(np.arange(1, 5.0)), -1)
    assert not strongly_commute(L, L.T)
    # commuting but not normal
    M = L + np.eye(5)
    Mp = L @ L - 2 * L
    assert np.allclose(M @ Mp, Mp @ M)
    assert not strongly_commute(M, Mp)
    assert not strongly_commute(np.array([[1, 0], [0, -1.0]]), np.array([[0, 1], [1, 0.0]]))


@pytest.mark.parametrize("seed", range(4))
def test_affiliated_product(seed):
    T1, T2 = _normal_pair(seed)
    rep = affiliated_product(T1, T2)
    assert rep.passed
    assert rep.q_gram_vs_f < 1e-10
    assert np.allclose(rep.product, T1 @ T2)


def test_affiliated_product_rejects_non_commuting():
    with pytest.raises(ValueError):
        affiliated_product(np.array([[1, 0], [0, -1.0]]), np.array([[0, 1], [1, 0.0]]))


def test_q_is_not_unitary_in_general():
    T1, T2 = _normal_pair(1)
    Q = q_matrix(T1, T2)
    assert norm(Q.conj().T @ Q - np.eye(len(Q))) > 1e-3


def test_f_and_g_values():
    assert f_fun(0.5, 0.5) == pytest.approx(0.625)
    assert f_fun(0, 0) == 1 and f_fun(1, 1) == 1
    assert g_fun(1, 0) == 0


def test_f_zero_set():
    assert f_zero_set() == [(0.0, 1.0), (1.0, 0.0)]


def test_density_surrogate():
    T1, T2 = _normal_pair(2)
    rep = density_surrogate(T1, T2)
    assert rep.implication_holds
    assert rep.min_singular > 0
    assert rep.zero_set == [(0.0, 1.0), (1.0, 0.0)]
