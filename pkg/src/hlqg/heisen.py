"""Truncated Fock-space models of Heisenberg-group representations.

Charge convention: ``TruncRep.lam`` is ``a*a - a a*`` on the low-lying block,
so a raising ladder has positive charge and a lowering ladder negative charge.
The heat weight that reproduces ``exp(-t a*a)`` is ``h_t(z, -lam/2)``; see
:func:`heat_smeared`.

Displacements are ``U_{z,t} = exp(-i t lam / 4) exp((z a - conj(z) a*) / 2)``.
With this normalization the Weyl relation reads
``U_z U_w = exp(i lam/4 Im(z conj(w))) U_{z+w}`` and the group law is
``(z,t)(w,u) = (z+w, t+u+Im(conj(z) w))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.linalg as sla


class QuadratureWarning(UserWarning):
    """The radial cutoff leaves a non-negligible part of the weight outside."""


TAIL_WARN = 1e-10


def lowering(N: int) -> np.ndarray:
    """Annihilation ladder: L e_n = sqrt(n) e_{n-1}."""
    return np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1).astype(complex)


def raising(N: int) -> np.ndarray:
    return lowering(N).T.copy()


@dataclass(frozen=True)
class TruncRep:
    N: int
    lam: float
    c0: complex
    a: np.ndarray = field(repr=False, compare=False)
    s: float = 1.0

    @property
    def ladder(self) -> str:
        return "raising" if self.lam > 0 else "lowering"

    @property
    def adj(self) -> np.ndarray:
        return self.a.conj().T

    def low_block(self) -> int:
        return self.N // 2


def build_irrep(lam: float, c0: complex = 0.0, N: int = 32, s: float = 1.0) -> TruncRep:
    """a = c0 + sqrt(|lam|) * ladder, raising for lam > 0 and lowering for lam < 0."""
    if N < 2:
        raise ValueError("N must be at least 2")
    if lam == 0:
        raise ValueError("zero charge: use a normal scalar instead")
    lad = raising(N) if lam > 0 else lowering(N)
    a = complex(c0) * np.eye(N) + math.sqrt(abs(lam)) * lad
    a.setflags(write=False)
    return TruncRep(N, float(lam), complex(c0), a, float(s))


def commutator_defect(r: TruncRep, P: int | None = None) -> float:
    """max column norm of (a*a - a a* - lam) on the first P basis vectors."""
    P = r.N - 1 if P is None else P
    X = r.adj @ r.a - r.a @ r.adj - r.lam * np.eye(r.N)
    return float(np.max(np.linalg.norm(X[:, :P], axis=0)))


def compress(X: np.ndarray, P: int) -> np.ndarray:
    return X[:P, :P]


def opnorm(X: np.ndarray) -> float:
    if X.size == 0:
        return 0.0
    return float(np.linalg.norm(X, 2))


def displacement(r: TruncRep, z: complex, t: float = 0.0) -> np.ndarray:
    K = (z * r.a - np.conj(z) * r.adj) / 2
    return np.exp(-1j * t * r.lam / 4) * sla.expm(K)


def weyl_phase(lam: float, z: complex, w: complex) -> complex:
    return np.exp(1j * lam / 4 * (z * np.conj(w)).imag)


def group_law(g: tuple[complex, float], h: tuple[complex, float], sign: int = 1) -> tuple[complex, float]:
    """(z,t)(w,u) = (z+w, t+u+sign*Im(conj(z) w)); only sign=+1 matches ``displacement``."""
    (z, t), (w, u) = g, h
    return (z + w, t + u + sign * (np.conj(z) * w).imag)


def group_law_residual(r: TruncRep, g: tuple[complex, float], h: tuple[complex, float],
                       sign: int = 1, P: int | None = None) -> float:
    """|| U_g U_h - U_{gh} || on the probe block."""
    P = r.low_block() if P is None else P
    lhs = displacement(r, *g) @ displacement(r, *h)
    rhs = displacement(r, *group_law(g, h, sign))
    return opnorm(compress(lhs - rhs, P))


def weyl_residual(r: TruncRep, z: complex, w: complex, P: int | None = None) -> float:
    P = r.low_block() if P is None else P
    lhs = displacement(r, z) @ displacement(r, w)
    rhs = weyl_phase(r.lam, z, w) * displacement(r, z + w)
    return opnorm(compress(lhs - rhs, P))


def heat_direct(r: TruncRep, t: float) -> np.ndarray:
    """exp(-t a*a)."""
    if t <= 0:
        raise ValueError("t must be positive")
    return _herm_exp(r.adj @ r.a, -t)


def heat_direct_dual(r: TruncRep, t: float) -> np.ndarray:
    """exp(-t a a*)."""
    if t <= 0:
        raise ValueError("t must be positive")
    return _herm_exp(r.a @ r.adj, -t)


def _herm_exp(H: np.ndarray, t: float) -> np.ndarray:
    w, V = np.linalg.eigh((H + H.conj().T) / 2)
    return (V * np.exp(t * w)) @ V.conj().T


def heat_kernel(z: complex | np.ndarray, x: float, t: float):
    """h_t(z, x) = x e^{tx} / (4 pi sinh tx) * exp(-|z|^2 x coth(tx) / 4)."""
    if t <= 0:
        raise ValueError("t must be positive")
    z2 = np.abs(z) ** 2
    if x == 0:
        return np.exp(-z2 / (4 * t)) / (4 * math.pi * t)
    # x e^{tx}/sinh(tx) = 2x / (1 - e^{-2tx}), stable for either sign of x
    pref = 2 * x / (-math.expm1(-2 * t * x)) / (4 * math.pi)
    return pref * np.exp(-z2 * x / math.tanh(t * x) / 4)


def heat_gauss_rate(x: float, t: float) -> float:
    """k in h_t(z, x) ~ exp(-k |z|^2)."""
    if x == 0:
        return 1.0 / (4 * t)
    return x / math.tanh(t * x) / 4


@dataclass(frozen=True)
class QuadSpec:
    R: float = 8.0
    n_r: int = 80
    n_theta: int = 64

    def __post_init__(self):
        if self.R <= 0 or self.n_r <= 0 or self.n_theta <= 0:
            raise ValueError("quadrature parameters must be positive")

    def refined(self, factor: float = 1.5) -> "QuadSpec":
        return QuadSpec(self.R, int(round(self.n_r * factor)), int(round(self.n_theta * factor)))

    def nodes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Radii, radial weights (including the Jacobian r) and angles; angle weight is 2pi/n_theta."""
        g, w = np.polynomial.legendre.leggauss(self.n_r)
        r = (g + 1) * self.R / 2
        wr = w * self.R / 2 * r
        th = 2 * math.pi * np.arange(self.n_theta) / self.n_theta
        return r, wr, th

    def area(self) -> float:
        _, wr, _ = self.nodes()
        return float(wr.sum() * 2 * math.pi)


def radius_for_tail(k: float, tail: float = 1e-12) -> float:
    """Cutoff R with exp(-k R^2) = tail for a Gaussian weight exp(-k|z|^2)."""
    return math.sqrt(-math.log(tail) / k)


def gaussian_tail(k: float, R: float) -> float:
    """Fraction of the mass of exp(-k|z|^2) outside the disk of radius R."""
    return math.exp(-k * R * R)


def _check_tail(k: float, R: float) -> float:
    tail = gaussian_tail(k, R)
    if tail > TAIL_WARN:
        warnings.warn(f"quadrature tail mass {tail:.2e} exceeds {TAIL_WARN:g}; increase R", QuadratureWarning)
    return tail


def smear_radial(r: TruncRep, weight, q: QuadSpec) -> np.ndarray:
    """Integral of weight(|z|) U_{z,0} d^2z over the disk, by polar quadrature.

    For each angle the skew-adjoint generator is diagonalized once, so every
    radial node costs only a diagonal exponential.
    """
    rad, wr, th = q.nodes()
    wts = wr * weight(rad)
    out = np.zeros((r.N, r.N), dtype=complex)
    for theta in th:
        e = np.exp(1j * theta)
        K = (e * r.a - np.conj(e) * r.adj) / 2  # U_{rho e^{i theta}} = exp(rho K)
        H = -1j * K
        w, V = np.linalg.eigh((H + H.conj().T) / 2)
        phases = np.exp(1j * np.outer(rad, w))  # exp(rho K) = V exp(i rho w) V*
        out += (V * (wts @ phases)) @ V.conj().T
    return out * (2 * math.pi / len(th))


def heat_smeared(r: TruncRep, t: float, q: QuadSpec | None = None) -> np.ndarray:
    """Quadrature of  int h_t(z, x) U_{z,0} d^2z  with x = -lam/2 = (a a* - a*a)/2."""
    x = -r.lam / 2
    k = heat_gauss_rate(x, t)
    if q is None:
        q = QuadSpec(R=radius_for_tail(k), n_r=80, n_theta=64)
    _check_tail(k, q.R)
    return smear_radial(r, lambda rho: heat_kernel(rho, x, t), q)


def auto_heat_quad(r: TruncRep, t: float, n_r: int = 80, n_theta: int = 64, tail: float = 1e-12) -> QuadSpec:
    return QuadSpec(radius_for_tail(heat_gauss_rate(-r.lam / 2, t), tail), n_r, n_theta)


def relative_error(X: np.ndarray, ref: np.ndarray, P: int) -> float:
    return opnorm(compress(X - ref, P)) / opnorm(compress(ref, P))


def heat_compare(r: TruncRep, t: float, q: QuadSpec | None = None, P: int | None = None) -> float:
    P = r.low_block() if P is None else P
    return relative_error(heat_smeared(r, t, q), heat_direct(r, t), P)


def gaussian_smear(r: TruncRep, eps: float, q: QuadSpec | None = None) -> np.ndarray:
    """I_eps = int (1/(pi eps)) exp(-|z|^2/eps) U_{z,0} d^2z."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = 1.0 / eps
    if q is None:
        q = QuadSpec(R=radius_for_tail(k), n_r=60, n_theta=48)
    _check_tail(k, q.R)
    return smear_radial(r, lambda rho: np.exp(-rho ** 2 / eps) / (math.pi * eps), q)


def generator_fd(r: TruncRep, h: float) -> np.ndarray:
    """Central-difference 2 d/dz U_{z,0} at z = 0."""
    if h <= 0:
        raise ValueError("h must be positive")
    dx = (displacement(r, h) - displacement(r, -h)) / (2 * h)
    dy = (displacement(r, 1j * h) - displacement(r, -1j * h)) / (2 * h)
    return dx - 1j * dy


def generator_fd_error(r: TruncRep, h: float, P: int | None = None) -> float:
    P = r.low_block() if P is None else P
    return float(np.max(np.abs(compress(generator_fd(r, h) - r.a, P))))


def matrix_to_json(X: np.ndarray) -> dict:
    """Row-major (re, im) pairs."""
    X = np.asarray(X, dtype=complex)
    return {
        "rows": int(X.shape[0]),
        "cols": int(X.shape[1]),
        "data": [[float(v.real), float(v.imag)] for v in X.ravel(order="C")],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    data = np.array(obj["data"], dtype=float)
    return (data[:, 0] + 1j * data[:, 1]).reshape(obj["rows"], obj["cols"])


def refinement_ladder(r: TruncRep, t: float, levels: Iterable[tuple[int, int]], P: int | None = None) -> list[float]:
    """Relative heat errors for a sequence of (n_r, n_theta) at a fixed tail cutoff."""
    R = radius_for_tail(heat_gauss_rate(-r.lam / 2, t))
    return [heat_compare(r, t, QuadSpec(R, nr, nth), P) for nr, nth in levels]
