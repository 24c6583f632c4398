"""Representation quadruples (A, B, C, D) for a, b, c, d and the tensor construction.

Matrices are stored as ``scipy.sparse`` CSR so that tensor products of
Fock spaces stay tractable.  Every quadruple carries a probe: the basis
vectors on which operator identities are measured, away from the ladder tops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import heisen
from .heisen import QuadSpec, TruncRep, build_irrep, displacement, heat_direct, heat_direct_dual
from .ncalg import DISPLAYED_RELATIONS, FreePoly

CASES = ("gamma_invertible", "gamma_zero", "direct_sum", "tensor")


@dataclass(frozen=True)
class Thresholds:
    exact: float = 1e-10
    truncation: float = 1e-3


@dataclass(frozen=True, eq=False)
class HLQuadruple:
    A: sp.csr_matrix
    B: sp.csr_matrix
    C: sp.csr_matrix
    D: sp.csr_matrix
    s: float
    case: str
    probe: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def P(self) -> int:
        return len(self.probe)

    def mats(self) -> list[sp.csr_matrix]:
        base = [self.A, self.B, self.C, self.D]
        return base + [m.conj().T.tocsr() for m in base]

    def dense(self) -> tuple[np.ndarray, ...]:
        return tuple(m.toarray() for m in (self.A, self.B, self.C, self.D))

    def with_probe(self, probe) -> "HLQuadruple":
        return HLQuadruple(self.A, self.B, self.C, self.D, self.s, self.case,
                           np.asarray(probe, dtype=int), self.meta)


def _csr(X) -> sp.csr_matrix:
    return sp.csr_matrix(X, dtype=complex)


def _grid_probe(dims: Sequence[int], per: Sequence[int]) -> np.ndarray:
    """Indices of basis vectors whose per-factor occupations are below ``per``."""
    idx = np.zeros(1, dtype=int)
    for n, p in zip(dims, per):
        idx = (idx[:, None] * n + np.arange(p)[None, :]).ravel()
    return idx


def build_invertible_gamma(c: complex, s: float, N: int, P: int | None = None) -> HLQuadruple:
    """Case c invertible: C = c, A and D Heisenberg generators on separate legs, B = (AD - 1)/c.

    A carries charge A*A - AA* = s|c|^2 and D carries D*D - DD* = -s|c|^2,
    as forced by the mixed relations for (a, a') and (d, d').
    """
    if c == 0:
        raise ValueError("c must be nonzero")
    if s == 0:
        raise ValueError("s must be nonzero (use classical_point for s = 0)")
    c = complex(c)
    P = N // 2 if P is None else P
    q2 = s * abs(c) ** 2
    ra = build_irrep(q2, 0.0, N, s)
    rd = build_irrep(-q2, 0.0, N, s)
    I = sp.identity(N, dtype=complex, format="csr")
    A = sp.kron(_csr(ra.a), I, format="csr")
    D = sp.kron(I, _csr(rd.a), format="csr")
    C = (c * sp.identity(N * N, dtype=complex)).tocsr()
    B = ((A @ D - sp.identity(N * N, dtype=complex)) / c).tocsr()
    return HLQuadruple(A, B, C, D, float(s), "gamma_invertible", _grid_probe((N, N), (P, P)),
                       {"c": c, "N": N, "reps": (ra, rd), "factors": (N, N), "per_factor": (P, P)})


def build_zero_gamma(c: complex, s: float, N: int, P: int | None = None, b0: complex = 0.0) -> HLQuadruple:
    """Case c = 0: A = c, D = 1/c, B a Heisenberg generator with b b* - b* b = s(|c|^2 - |c|^-2)."""
    if c == 0:
        raise ValueError("c must be nonzero")
    c = complex(c)
    charge = s * (abs(c) ** 2 - abs(c) ** -2)
    P = N // 2 if P is None else P
    I = sp.identity(N, dtype=complex, format="csr")
    if charge == 0:
        if s != 0:
            raise ValueError("|c| = 1 with s != 0 gives zero charge")
        B = (complex(b0) * I).tocsr()
        rb = None
    else:
        rb = build_irrep(-charge, b0, N, s)
        B = _csr(rb.a)
    Z = sp.csr_matrix((N, N), dtype=complex)
    return HLQuadruple((c * I).tocsr(), B, Z, (I / c).tocsr(), float(s), "gamma_zero",
                       np.arange(P), {"c": c, "N": N, "reps": (rb,), "factors": (N,), "per_factor": (P,)})


def classical_point(a: complex, b: complex, c: complex, d: complex, tol: float = 1e-12) -> HLQuadruple:
    """1x1 quadruple at s = 0 for a point of SL(2,C)."""
    if abs(a * d - b * c - 1) > tol:
        raise ValueError("ad - bc must equal 1")
    m = lambda x: sp.csr_matrix(np.array([[complex(x)]]))
    case = "gamma_invertible" if c != 0 else "gamma_zero"
    return HLQuadruple(m(a), m(b), m(c), m(d), 0.0, case, np.arange(1), {"point": (a, b, c, d)})


def direct_sum(q0: HLQuadruple, q1: HLQuadruple) -> HLQuadruple:
    if q0.case != "gamma_zero" or q1.case != "gamma_invertible":
        raise ValueError("direct_sum expects (gamma_zero, gamma_invertible)")
    if q0.s != q1.s:
        raise ValueError("deformation parameters differ")
    mats = [sp.block_diag((x, y), format="csr") for x, y in zip(
        (q0.A, q0.B, q0.C, q0.D), (q1.A, q1.B, q1.C, q1.D))]
    probe = np.concatenate([q0.probe, q0.dim + q1.probe])
    return HLQuadruple(*mats, q0.s, "direct_sum", probe, {"parts": (q0, q1), "split": q0.dim})


def tensor(q: HLQuadruple, qp: HLQuadruple) -> HLQuadruple:
    """A'' = A(x)A' + B(x)C', B'' = A(x)B' + B(x)D', C'' = C(x)A' + D(x)C', D'' = C(x)B' + D(x)D'."""
    if q.s != qp.s:
        raise ValueError("deformation parameters differ")
    k = lambda x, y: sp.kron(x, y, format="csr")
    A = k(q.A, qp.A) + k(q.B, qp.C)
    B = k(q.A, qp.B) + k(q.B, qp.D)
    C = k(q.C, qp.A) + k(q.D, qp.C)
    D = k(q.C, qp.B) + k(q.D, qp.D)
    probe = (q.probe[:, None] * qp.dim + qp.probe[None, :]).ravel()
    return HLQuadruple(A.tocsr(), B.tocsr(), C.tocsr(), D.tocsr(), q.s, "tensor", probe,
                       {"parents": (q, qp)})


# ---------------------------------------------------------------------------
# Residual measurement


def opnorm(X) -> float:
    """Spectral norm of a dense or sparse matrix."""
    if sp.issparse(X):
        X = X.tocsr()
        X.eliminate_zeros()
        if X.nnz == 0:
            return 0.0
        if min(X.shape) <= 1200:
            return float(np.linalg.norm(X.toarray(), 2))
        return float(spla.svds(X, k=1, return_singular_vectors=False, tol=1e-8)[0])
    X = np.asarray(X)
    return float(np.linalg.norm(X, 2)) if X.size else 0.0


def _selector(n: int, cols: np.ndarray) -> sp.csr_matrix:
    return sp.csr_matrix((np.ones(len(cols), dtype=complex), (cols, np.arange(len(cols)))),
                         shape=(n, len(cols)))


def eval_free(q: HLQuadruple, rel: FreePoly, cols: np.ndarray | None = None):
    """Evaluate a free-algebra element on the given basis columns (all if None)."""
    mats = q.mats()
    n = q.dim
    X = sp.identity(n, dtype=complex, format="csr") if cols is None else _selector(n, cols)
    out = sp.csr_matrix(X.shape, dtype=complex)
    for word, coef in rel.terms().items():
        val = coef.evaluate(q.s)
        if val == 0:
            continue
        Y = X
        for l in reversed(word):
            Y = mats[l] @ Y
        out = out + val * Y
    return out.tocsr()


def probe_residual(q: HLQuadruple, rel: FreePoly, probe: np.ndarray | None = None) -> float:
    probe = q.probe if probe is None else probe
    R = eval_free(q, rel, probe)[probe, :]
    return opnorm(R)


def full_residual(q: HLQuadruple, rel: FreePoly) -> float:
    """Largest column norm of the relation on the whole truncated space."""
    R = eval_free(q, rel)
    if R.nnz == 0:
        return 0.0
    return float(np.sqrt(np.max(np.asarray(abs(R).power(2).sum(axis=0)))))


@dataclass
class RelationEntry:
    name: str
    residual: float
    full_residual: float
    classification: str
    threshold: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.threshold


@dataclass
class RelationReport:
    case: str
    dim: int
    probe_size: int
    entries: list[RelationEntry]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def by_name(self) -> dict[str, RelationEntry]:
        return {e.name: e for e in self.entries}

    def max_residual(self) -> float:
        return max((e.residual for e in self.entries), default=0.0)


def determinant_gb() -> FreePoly:
    """c*b - (a*d - 1), the form in which b is reconstructed from c."""
    return FreePoly.word("cb") - FreePoly.word("ad") + FreePoly.const(1)


def check_relations(q: HLQuadruple, thresholds: Thresholds = Thresholds(),
                    extra: bool = True) -> RelationReport:
    """Residuals of every displayed relation, compressed to the probe.

    A relation counts as exact when it holds on the entire truncated space to
    the exact threshold; otherwise it is truncation-limited and judged on the
    probe with the looser threshold.
    """
    rels = list(DISPLAYED_RELATIONS)
    if extra:
        rels.append(("cb=ad-1", determinant_gb()))
    entries = []
    for name, rel in rels:
        res = probe_residual(q, rel)
        full = full_residual(q, rel)
        exact = full <= thresholds.exact
        entries.append(RelationEntry(name, res, full, "exact" if exact else "truncation-limited",
                                     thresholds.exact if exact else thresholds.truncation))
    return RelationReport(q.case, q.dim, q.P, entries)


def compressed(q: HLQuadruple, which: str = "ABCD") -> dict[str, np.ndarray]:
    mats = dict(zip("ABCD", (q.A, q.B, q.C, q.D)))
    p = q.probe
    return {k: mats[k][p, :][:, p].toarray() for k in which}


def normality_defect(q: HLQuadruple) -> float:
    X = (q.C.conj().T @ q.C - q.C @ q.C.conj().T).tocsr()
    return opnorm(X[q.probe, :][:, q.probe])


# ---------------------------------------------------------------------------
# Identities for the invertible case


def _base_reps(q: HLQuadruple) -> tuple[TruncRep, TruncRep, complex]:
    if q.case != "gamma_invertible" or "reps" not in q.meta:
        raise ValueError("expects a quadruple from build_invertible_gamma")
    ra, rd = q.meta["reps"]
    return ra, rd, q.meta["c"]


@dataclass
class ShiftResult:
    residual: float
    residual_literal: float
    kappa: complex
    probe: int


def shift_coefficient(s: float, c: complex, cp: complex) -> complex:
    """kappa with  U C'' U^{-1} = C'' + kappa conj(z); equals 1 at s = 1, c = c' = 1."""
    return s / 2 * (abs(c) ** 2 * cp / np.conj(cp) + abs(cp) ** 2 * c / np.conj(c))


def check_shift_identity(q2: HLQuadruple, z: complex, P: int | None = None) -> ShiftResult:
    """Conjugate C'' by displacements of D (first factor) and A' (second factor).

    Only the D leg of the first factor and the A' leg of the second factor
    are touched, and C'' = c (1 x A') + c' (D x 1) on them, so the identity is
    measured exactly on that two-leg space.
    """
    if q2.case != "tensor":
        raise ValueError("shift identity needs a tensor quadruple")
    q, qp = q2.meta["parents"]
    _, rd, c = _base_reps(q)
    ra2, _, cp = _base_reps(qp)
    N1, N2 = rd.N, ra2.N
    if P is None:
        P = min(N1, N2) // 4
    I1, I2 = np.eye(N1), np.eye(N2)
    Cpp = c * np.kron(I1, ra2.a) + cp * np.kron(rd.a, I2)
    U = np.kron(displacement(rd, z / cp), displacement(ra2, -z / c))
    V = np.kron(displacement(rd, -z / cp), displacement(ra2, z / c))
    kappa = shift_coefficient(q2.s, c, cp)
    probe = _grid_probe((N1, N2), (P, P))
    lhs = U @ Cpp @ V
    sub = lambda X: X[np.ix_(probe, probe)]
    eye = np.eye(N1 * N2)
    res = opnorm(sub(lhs - Cpp - kappa * np.conj(z) * eye))
    lit = opnorm(sub(lhs - Cpp - np.conj(z) * eye))
    return ShiftResult(res, lit, kappa, P)


def check_star_sum_identity(q: HLQuadruple) -> float:
    """(A*A + D*D) - (AA* + DD*) on the probe."""
    rel = (FreePoly.word(["a'", "a"]) + FreePoly.word(["d'", "d"])
           - FreePoly.word(["a", "a'"]) - FreePoly.word(["d", "d'"]))
    return probe_residual(q, rel)


SUMT_FORMS = ("exact", "exact_dual", "literal")


def check_sumt_expansion(q: HLQuadruple, form: str = "exact") -> float:
    """(1 + T*T) e^{-A*A-D*D} against its four-term expansion, T = AD - 1.

    The last term is  -A* E1 D* E2  with (E1, E2) = (e^{-A*A}, e^{-D*D}) for
    "exact", (e^{-AA*}, e^{-DD*}) for "exact_dual" and (e^{-AA*}, e^{-D*D})
    for "literal", the mixed ordering whose residual does not vanish.
    """
    if form not in SUMT_FORMS:
        raise ValueError(form)
    ra, rd, _ = _base_reps(q)
    a, d = ra.a, rd.a
    ea, ed = heat_direct(ra, 1.0), heat_direct(rd, 1.0)
    ea_dual, ed_dual = heat_direct_dual(ra, 1.0), heat_direct_dual(rd, 1.0)
    Na, Nd = ra.N, rd.N
    Ia, Id = np.eye(Na), np.eye(Nd)
    A = np.kron(a, Id)
    D = np.kron(Ia, d)
    T = A @ D - np.eye(Na * Nd)
    E = np.kron(ea, ed)
    lhs = (np.eye(Na * Nd) + T.conj().T @ T) @ E
    ah, dh = a.conj().T, d.conj().T
    last = {
        "exact": np.kron(ah @ ea, dh @ ed),
        "exact_dual": np.kron(ah @ ea_dual, dh @ ed_dual),
        "literal": np.kron(ah @ ea_dual, dh @ ed),
    }[form]
    rhs = 2 * E + np.kron(ah @ a @ ea, dh @ d @ ed) - np.kron(a @ ea, d @ ed) - last
    p = q.probe
    return opnorm((lhs - rhs)[np.ix_(p, p)])


def check_asa1_smearing(q: HLQuadruple, quad: QuadSpec | None = None) -> float:
    """e^{-A*A} e^{-D*D} against the product of the two heat smearings.

    The legs commute, so the double integral is the tensor product of two
    single smearings, each with its own heat weight.
    """
    ra, rd, _ = _base_reps(q)
    Sa = heisen.heat_smeared(ra, 1.0, quad or heisen.auto_heat_quad(ra, 1.0))
    Sd = heisen.heat_smeared(rd, 1.0, quad or heisen.auto_heat_quad(rd, 1.0))
    H = np.kron(heat_direct(ra, 1.0), heat_direct(rd, 1.0))
    p = q.probe
    return opnorm((np.kron(Sa, Sd) - H)[np.ix_(p, p)])


def classical_matrix(q: HLQuadruple) -> np.ndarray:
    """2x2 matrix [[a, b], [c, d]] of a 1x1 quadruple."""
    if q.dim != 1:
        raise ValueError("classical_matrix needs a 1x1 quadruple")
    A, B, C, D = (m.toarray()[0, 0] for m in (q.A, q.B, q.C, q.D))
    return np.array([[A, B], [C, D]])
