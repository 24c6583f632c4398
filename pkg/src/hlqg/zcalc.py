"""z-transform calculus on finite matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _herm_fun(H: np.ndarray, fn) -> np.ndarray:
    """fn applied to a Hermitian matrix through its eigendecomposition."""
    w, V = np.linalg.eigh((H + H.conj().T) / 2)
    return (V * fn(w)) @ V.conj().T


def _inv_sqrt(H: np.ndarray) -> np.ndarray:
    return _herm_fun(H, lambda w: 1.0 / np.sqrt(np.clip(w, 0.0, None)))


def _sqrt(H: np.ndarray) -> np.ndarray:
    return _herm_fun(H, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def _as_matrix(T) -> np.ndarray:
    T = np.asarray(T, dtype=complex)
    return T.reshape(1, 1) if T.ndim == 0 else T


def z_transform(T) -> np.ndarray:
    """Z = T (1 + T*T)^{-1/2}."""
    T = _as_matrix(T)
    n = T.shape[1]
    return T @ _inv_sqrt(np.eye(n) + T.conj().T @ T)


def inverse_z(Z) -> np.ndarray:
    """T = Z (1 - Z*Z)^{-1/2}; requires ||Z|| < 1."""
    Z = _as_matrix(Z)
    n = Z.shape[1]
    M = np.eye(n) - Z.conj().T @ Z
    if np.linalg.eigvalsh((M + M.conj().T) / 2).min() <= 0:
        raise ValueError("||Z|| must be < 1")
    return Z @ _inv_sqrt(M)


def norm(X) -> float:
    return float(np.linalg.norm(_as_matrix(X), 2))


@dataclass(frozen=True)
class ZPair:
    T: np.ndarray
    Z: np.ndarray

    @classmethod
    def of(cls, T) -> "ZPair":
        T = _as_matrix(T)
        return cls(T, z_transform(T))

    def roundtrip_error(self) -> float:
        return norm(inverse_z(self.Z) - self.T)


def roundtrip_error(T) -> float:
    return ZPair.of(T).roundtrip_error()


def strongly_commute(T1, T2, tol: float = 1e-10) -> bool:
    z1, z2 = z_transform(T1), z_transform(T2)
    c1 = norm(z1 @ z2 - z2 @ z1)
    c2 = norm(z1.conj().T @ z2 - z2 @ z1.conj().T)
    return c1 <= tol and c2 <= tol


@dataclass
class ProductReport:
    product: np.ndarray
    commutator: float
    z_direct: np.ndarray
    z_from_q: np.ndarray
    q_consistency: float
    q_gram_vs_f: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.commutator, self.q_consistency, self.q_gram_vs_f) <= self.tol


def q_matrix(T1, T2) -> np.ndarray:
    """[[(1-z1*z1)^{1/2}(1-z2*z2)^{1/2}, -z1* z2*], [z1 z2, (1-z1z1*)^{1/2}(1-z2z2*)^{1/2}]]."""
    z1, z2 = z_transform(T1), z_transform(T2)
    n = z1.shape[0]
    I = np.eye(n)
    q11 = _sqrt(I - z1.conj().T @ z1) @ _sqrt(I - z2.conj().T @ z2)
    q12 = -z1.conj().T @ z2.conj().T
    q21 = z1 @ z2
    q22 = _sqrt(I - z1 @ z1.conj().T) @ _sqrt(I - z2 @ z2.conj().T)
    return np.block([[q11, q12], [q21, q22]])


def affiliated_product(T1, T2, tol: float = 1e-10) -> ProductReport:
    """Product of strongly commuting matrices with its z-transform bookkeeping.

    The (2,1) block composed with the inverse of the (1,1) block recovers
    T1 T2, and the z-transform of the product is Q21 (Q11^2 + Q21* Q21)^{-1/2}.
    The Gram block Q11*Q11 + Q21*Q21 is compared with the matrix version of
    f(x1, x2) = (1-x1^2)(1-x2^2) + x1^2 x2^2 evaluated at x_k^2 = z_k* z_k.
    """
    T1, T2 = _as_matrix(T1), _as_matrix(T2)
    if not strongly_commute(T1, T2, tol):
        raise ValueError("inputs do not strongly commute")
    prod = T1 @ T2
    comm = norm(prod - T2 @ T1)
    Q = q_matrix(T1, T2)
    n = T1.shape[0]
    q11, q21 = Q[:n, :n], Q[n:, :n]
    z_direct = z_transform(prod)
    z_from_q = q21 @ _inv_sqrt(q11.conj().T @ q11 + q21.conj().T @ q21)
    recon = q21 @ np.linalg.inv(q11)
    consistency = max(norm(z_direct - z_from_q), norm(recon - prod) / max(1.0, norm(prod)))
    z1, z2 = z_transform(T1), z_transform(T2)
    I = np.eye(n)
    x1, x2 = z1.conj().T @ z1, z2.conj().T @ z2
    f_mat = (I - x1) @ (I - x2) + x1 @ x2
    gram = norm(q11.conj().T @ q11 + q21.conj().T @ q21 - f_mat)
    return ProductReport(prod, comm, z_direct, z_from_q, consistency, gram, tol)


def f_fun(x1, x2):
    return (1 - x1 ** 2) * (1 - x2 ** 2) + x1 ** 2 * x2 ** 2


def g_fun(x1, x2):
    return np.sqrt(np.clip((1 - x1 ** 2) * (1 - x2 ** 2), 0.0, None))


@dataclass
class DensityReport:
    min_singular: float
    implication_holds: bool
    zero_set: list[tuple[float, float]]
    corner_values: dict


def density_surrogate(T1, T2, grid: int = 201) -> DensityReport:
    """Smallest singular value of (1 + (T1T2)*(T1T2)) (1 + T1*T1)^{-1} (1 + T2*T2)^{-1}.

    Also scans f and g on [0,1]^2: wherever f vanishes g must vanish, and the
    zero set of f is {(1,0), (0,1)}.
    """
    T1, T2 = _as_matrix(T1), _as_matrix(T2)
    n = T1.shape[0]
    I = np.eye(n)
    P = T1 @ T2
    M = (I + P.conj().T @ P) @ np.linalg.inv(I + T1.conj().T @ T1) @ np.linalg.inv(I + T2.conj().T @ T2)
    smin = float(np.linalg.svd(M, compute_uv=False).min())
    zs = f_zero_set(grid)
    x = np.linspace(0.0, 1.0, grid)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    f = f_fun(X1, X2)
    g = g_fun(X1, X2)
    implication = bool(np.all(g[f == 0] == 0))
    corners = {str(p): (float(f_fun(*p)), float(g_fun(*p))) for p in [(0, 0), (1, 0), (0, 1), (1, 1)]}
    return DensityReport(smin, implication, zs, corners)


def f_zero_set(grid: int = 201, tol: float = 1e-12) -> list[tuple[float, float]]:
    """Grid zeros of f on [0,1]^2, each confirmed by local minimization on a refined patch."""
    x = np.linspace(0.0, 1.0, grid)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    f = f_fun(X1, X2)
    h = 1.0 / (grid - 1)
    out = []
    cand = np.argwhere(f <= 4 * h)
    seen = set()
    for i, j in cand:
        x0, y0 = x[i], x[j]
        u = np.linspace(max(0.0, x0 - h), min(1.0, x0 + h), 41)
        v = np.linspace(max(0.0, y0 - h), min(1.0, y0 + h), 41)
        U, V = np.meshgrid(u, v, indexing="ij")
        F = f_fun(U, V)
        k = np.unravel_index(np.argmin(F), F.shape)
        if F[k] <= tol:
            pt = (round(float(U[k]), 9), round(float(V[k]), 9))
            if pt not in seen:
                seen.add(pt)
                out.append(pt)
    return sorted(out)
