"""Special kernels: the skew bicharacter, radial Fourier transforms, the
two-point kernel l, the generating function f and the exact 2x2 shear
factorization of the Weyl element."""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import j0, k1

from .heisen import QuadSpec, QuadratureWarning, heat_kernel
from .scalars import GaussQ

KERNELS = ("psi", "h_t", "h_tilde", "l", "f_gen")
TAIL_TOL = 1e-9


@dataclass
class KernelEval:
    kernel: str
    params: dict
    value: complex
    error: float = 0.0
    method: str = "closed-form"
    quad: dict | None = None

    def row(self) -> dict:
        v = complex(self.value)
        out = {"kernel": self.kernel}
        out.update({k: _fmt(v_) for k, v_ in self.params.items()})
        out.update(value_re=v.real, value_im=v.imag, error=self.error, method=self.method)
        return out


def _fmt(v):
    if isinstance(v, complex):
        return f"{v.real:g}{v.imag:+g}j"
    return v


# ---------------------------------------------------------------- psi

def psi(z: complex, zp: complex, s: float) -> complex:
    """exp(i (s/4) Im(z conj(z')))."""
    return complex(np.exp(1j * s / 4 * (z * np.conj(zp)).imag))


# ---------------------------------------------------------------- h tilde

def h_tilde_exact(w: complex, s: float) -> float:
    """pi s^3 |w| K_1(s|w|), with the limit pi s^2 at w = 0."""
    if s == 0:
        raise ValueError("s must be nonzero")
    s = abs(s)
    k = abs(w)
    if k == 0:
        return math.pi * s * s
    return float(math.pi * s ** 3 * k * k1(s * k))


def _panel_nodes(R: float, n: int, per: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre on [0, R] with n // per equal panels."""
    panels = max(1, n // per)
    g, w = np.polynomial.legendre.leggauss(per)
    h = R / panels
    left = np.arange(panels) * h
    x = (left[:, None] + (g[None, :] + 1) * h / 2).ravel()
    wt = np.tile(w * h / 2, panels)
    return x, wt


def h_tilde_tail(k: float, s: float, R: float) -> float:
    """Upper bound on the part of the transform beyond radius R."""
    if k == 0:
        return math.pi * s ** 4 / (s * s + R * R)
    # |J0(x)| <= sqrt(2 / (pi x)) and (1 + r^2/s^2)^-2 <= s^4 / r^4
    return 2 * math.pi * s ** 4 * math.sqrt(2 / (math.pi * k)) * 0.4 * R ** -2.5


def h_tilde_quad(w: complex, s: float, tol: float = 1e-7) -> QuadSpec:
    """Cutoff from the tail bound, panel count from the oscillation length."""
    s, k = abs(s), abs(w)
    target = tol * math.pi * s * s
    if k == 0:
        R = s * math.sqrt(max(s * s * math.pi / target - 1, 1.0))
    else:
        R = (2 * math.pi * s ** 4 * math.sqrt(2 / (math.pi * k)) * 0.4 / target) ** 0.4
    width = min(s, math.pi / k) if k else s
    n = 8 * max(4, int(math.ceil(R / width)))
    return QuadSpec(R=R, n_r=n, n_theta=1)


def _h_tilde_radial(k: float, s: float, q: QuadSpec) -> float:
    r, wr = _panel_nodes(q.R, q.n_r)
    return float(2 * math.pi * np.sum(wr * r * j0(k * r) / (1 + (r / s) ** 2) ** 2))


def h_tilde(w: complex, s: float, q: QuadSpec | None = None) -> KernelEval:
    """Integral of exp(i Im(w z)) / (1 + |z|^2 / s^2)^2 over the plane.

    The angular integral is done in closed form (2 pi J0), leaving a radial
    integral evaluated by composite Gauss-Legendre. The error estimate is the
    difference against a run with twice as many nodes, plus the tail bound.
    """
    if s == 0:
        raise ValueError("s must be nonzero")
    s = abs(float(s))
    k = abs(complex(w))
    if q is None:
        q = h_tilde_quad(w, s)
    tail = h_tilde_tail(k, s, q.R)
    if tail > TAIL_TOL * max(1.0, math.pi * s * s) * 1e3:
        warnings.warn(f"h_tilde cutoff R={q.R:g} leaves tail bound {tail:.2e}", QuadratureWarning)
    v1 = _h_tilde_radial(k, s, q)
    v2 = _h_tilde_radial(k, s, QuadSpec(q.R, 2 * q.n_r, 1))
    return KernelEval(
        "h_tilde", {"w": complex(w), "s": s}, v2, abs(v2 - v1) + tail, "quadrature",
        {"R": q.R, "n_r": q.n_r},
    )


# ---------------------------------------------------------------- l

def _tan_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """r = tan(u) on [0, pi/2); weights absorb r dr / (1 + r^2)^2 = sin u cos u du."""
    g, w = np.polynomial.legendre.leggauss(n)
    u = (g + 1) * math.pi / 4
    return np.tan(u), w * math.pi / 4 * np.sin(u) * np.cos(u)


def _unit_transform(k: np.ndarray) -> np.ndarray:
    """Transform of (1 + |z|^2)^-2 at frequency modulus k: pi k K_1(k)."""
    k = np.asarray(k, dtype=float)
    out = np.full(k.shape, math.pi)
    m = k > 1e-300
    out[m] = math.pi * k[m] * k1(k[m])
    return out


@dataclass(frozen=True)
class LQuad:
    n_r: int = 100
    n_theta: int = 64

    def refined(self) -> "LQuad":
        return LQuad(2 * self.n_r, 2 * self.n_theta)


def _l_nested_value(w1: complex, w2: complex, s: float, q: LQuad) -> complex:
    r, wr = _tan_nodes(q.n_r)
    th = 2 * math.pi * np.arange(q.n_theta) / q.n_theta
    Z = r[:, None] * np.exp(1j * th)[None, :]
    phase = np.exp(-1j * (Z * w1).imag)
    # the cross term only moves the z2 frequency: w2 -> w2 + (s/4) conj(z1)
    inner = _unit_transform(np.abs(w2 + s / 4 * np.conj(Z)))
    return complex(np.sum(wr[:, None] * phase * inner) * 2 * math.pi / q.n_theta)


def l_kernel(w1: complex, w2: complex, s: float, q: LQuad | None = None) -> KernelEval:
    """l(w1, w2) = int d^2z1 d^2z2 exp(-i Im(z1 w1 + z2 w2 - (s/4) z1 conj(z2))) / K(z1) K(z2),
    K(z) = (1 + |z|^2)^2, by nested quadrature.

    At s = 0 the integral splits into two plane transforms, which are
    returned in closed form.
    """
    w1, w2 = complex(w1), complex(w2)
    params = {"w1": w1, "w2": w2, "s": float(s)}
    if s == 0:
        val = float(_unit_transform(np.array([abs(w1)]))[0] * _unit_transform(np.array([abs(w2)]))[0])
        return KernelEval("l", params, val, 0.0, "closed-form")
    q = LQuad() if q is None else q
    v1 = _l_nested_value(w1, w2, s, q)
    v2 = _l_nested_value(w1, w2, s, q.refined())
    return KernelEval("l", params, v2, abs(v2 - v1), "quadrature",
                      {"scheme": "nested", "n_r": q.n_r, "n_theta": q.n_theta})


def l_kernel_direct(w1: complex, w2: complex, s: float, q: LQuad = LQuad(100, 48),
                    chunk: int = 256) -> KernelEval:
    """Brute-force 4-D quadrature on a product of two polar grids.

    The full phase is evaluated node by node; nothing about its structure is
    used, so this serves as an independent check of the nested scheme.
    """
    w1, w2 = complex(w1), complex(w2)
    r, wr = _tan_nodes(q.n_r)
    th = 2 * math.pi * np.arange(q.n_theta) / q.n_theta
    Z = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    W = np.repeat(wr, q.n_theta) * 2 * math.pi / q.n_theta
    total = 0j
    for i in range(0, Z.size, chunk):
        z1 = Z[i : i + chunk, None]
        phi = (z1 * w1 + Z[None, :] * w2 - s / 4 * z1 * np.conj(Z[None, :])).imag
        total += np.sum(W[i : i + chunk] * (np.exp(-1j * phi) @ W))
    return KernelEval("l", {"w1": w1, "w2": w2, "s": float(s)}, complex(total), float("nan"),
                      "quadrature", {"scheme": "direct", "n_r": q.n_r, "n_theta": q.n_theta})


# ---------------------------------------------------------------- f

SERIES_CUT = 1e-6


def _tanh_over(x: float) -> float:
    """tanh(x)/x, with its Taylor series near 0."""
    if abs(x) < SERIES_CUT:
        return 1 - x * x / 3 + 2 * x ** 4 / 15
    return math.tanh(x) / x


def _log_cosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2 * x)) - math.log(2)


def log_f_gen(alpha: complex, gamma: complex, delta: complex, s: float) -> float:
    X = s * abs(gamma) ** 2 / 2
    return -2 * _log_cosh(X) - (abs(alpha) ** 2 + abs(delta) ** 2) * _tanh_over(X)


def f_gen(alpha: complex, gamma: complex, delta: complex, s: float) -> float:
    """cosh(X)^-2 exp(-(|alpha|^2 + |delta|^2) tanh(X)/X) with X = s|gamma|^2/2."""
    if s == 0:
        raise ValueError("s must be nonzero")
    return math.exp(log_f_gen(alpha, gamma, delta, s))


def smeared_factor_exact(a: complex, x: float) -> float:
    """int h_1(z, x) exp(i Im(z a)) d^2z = e^x / cosh(x) * exp(-|a|^2 tanh(x)/x)."""
    return math.exp(x - _log_cosh(x) - abs(a) ** 2 * _tanh_over(x))


def _smeared_factor(a: complex, x: float, q: QuadSpec) -> complex:
    rad, wr, th = q.nodes()
    Z = rad[:, None] * np.exp(1j * th)[None, :]
    vals = heat_kernel(Z, x, 1.0) * np.exp(1j * (Z * a).imag)
    return complex(np.sum(wr[:, None] * vals) * 2 * math.pi / len(th))


def fgen_quad(x: float, n_r: int = 60, n_theta: int = 48, tail: float = 1e-14) -> QuadSpec:
    k = x / math.tanh(x) / 4 if x else 0.25
    return QuadSpec(R=math.sqrt(-math.log(tail) / k), n_r=n_r, n_theta=n_theta)


@dataclass
class SmearedF:
    closed: float
    value: complex
    error: float
    rel_error: float
    ladder: list[float] = field(default_factory=list)


def f_gen_smeared(alpha: complex, gamma: complex, delta: complex, s: float,
                  q: QuadSpec | None = None, levels: int = 4) -> SmearedF:
    """Double integral of h_1(z1, -X) h_1(z2, X) exp(i Im(z1 alpha)) exp(i Im(z2 delta)).

    The integrand is a product, so the 4-D integral is the product of two
    polar quadratures. ``ladder`` holds the refinement-difference estimates
    for successive doublings of the angular and radial node counts, starting
    from a deliberately coarse grid so that the ladder is informative.
    """
    if s == 0:
        raise ValueError("s must be nonzero")
    X = s * abs(gamma) ** 2 / 2
    xs = (-X, X)
    base = [q or fgen_quad(x, 4, 4) for x in xs]
    vals = []
    for lev in range(levels):
        f = 2 ** lev
        v = 1 + 0j
        for a, x, b in zip((alpha, delta), xs, base):
            v *= _smeared_factor(a, x, QuadSpec(b.R, b.n_r * f, b.n_theta * f))
        vals.append(v)
    ladder = [abs(vals[i + 1] - vals[i]) for i in range(levels - 1)]
    closed = f_gen(alpha, gamma, delta, s)
    best = vals[-1]
    return SmearedF(closed, best, ladder[-1] if ladder else float("nan"),
                    abs(best - closed) / closed, ladder)


# ---------------------------------------------------------------- g_w

Mat2 = tuple[tuple[GaussQ, GaussQ], tuple[GaussQ, GaussQ]]


def _mm(X: Mat2, Y: Mat2) -> Mat2:
    return tuple(
        tuple(X[i][0] * Y[0][j] + X[i][1] * Y[1][j] for j in range(2)) for i in range(2)
    )  # type: ignore[return-value]


def weyl_element(x: GaussQ) -> Mat2:
    zero = GaussQ(0)
    return ((zero, x.inverse()), (-x, zero))


def shear(t: GaussQ) -> Mat2:
    return ((GaussQ(1), t), (GaussQ(0), GaussQ(1)))


def det2(X: Mat2) -> GaussQ:
    return X[0][0] * X[1][1] - X[0][1] * X[1][0]


def gw_sides(u, v, w) -> tuple[Mat2, Mat2]:
    u, v, w = (GaussQ.coerce(x) for x in (u, v, w))
    if not (u and v and w):
        raise ValueError("u, v, w must be nonzero")
    ui, vi, wi = u.inverse(), v.inverse(), w.inverse()
    rhs = shear(-(v * ui * wi))
    for M in (weyl_element(w), shear(-(u * vi * wi)), weyl_element(v), shear(-(w * ui * vi))):
        rhs = _mm(rhs, M)
    return weyl_element(u), rhs


def verify_gw_factorization(u, v, w) -> bool:
    """Exact check of g_u = S(-v/(uw)) g_w S(-u/(vw)) g_v S(-w/(uv))."""
    lhs, rhs = gw_sides(u, v, w)
    return lhs == rhs


def random_gaussq(rng: random.Random, bound: int = 9) -> GaussQ:
    while True:
        re = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        im = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        g = GaussQ(re, im)
        if g:
            return g


@dataclass
class GWTrial:
    u: GaussQ
    v: GaussQ
    w: GaussQ
    holds: bool
    det_lhs: GaussQ
    det_rhs: GaussQ


def gw_trials(n: int = 100, seed: int = 0) -> list[GWTrial]:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        u, v, w = (random_gaussq(rng) for _ in range(3))
        lhs, rhs = gw_sides(u, v, w)
        out.append(GWTrial(u, v, w, lhs == rhs, det2(lhs), det2(rhs)))
    return out
