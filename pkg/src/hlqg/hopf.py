"""Comultiplication, coinverse and counit, plus the Hopf *-algebra axiom battery."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

from .ncalg import (
    A, AS, B, BS, C, CS, D, DS,
    ALL_RELATIONS,
    FreePoly,
    NCPoly,
    SCoeff,
    TensorPoly,
    LETTERS,
    adjoint,
    mono_word,
    normal_form,
    random_word,
    to_tensor1,
)

_ONE = SCoeff.const(1)

# Delta(x) = sum of (left letter, right letter); starred rows are written out
# rather than derived so that the *-compatibility check has something to test.
DELTA_TABLE: dict[int, tuple[tuple[int, int], ...]] = {
    A: ((A, A), (B, C)),
    B: ((A, B), (B, D)),
    C: ((C, A), (D, C)),
    D: ((C, B), (D, D)),
    AS: ((AS, AS), (BS, CS)),
    BS: ((AS, BS), (BS, DS)),
    CS: ((CS, AS), (DS, CS)),
    DS: ((CS, BS), (DS, DS)),
}

KAPPA_TABLE: dict[int, tuple[int, int]] = {
    A: (1, D), B: (-1, B), C: (-1, C), D: (1, A),
    AS: (1, DS), BS: (-1, BS), CS: (-1, CS), DS: (1, AS),
}

EPS_TABLE: dict[int, int] = {A: 1, B: 0, C: 0, D: 1, AS: 1, BS: 0, CS: 0, DS: 1}


@lru_cache(maxsize=None)
def _delta_letter(l: int) -> TensorPoly:
    out = TensorPoly(2)
    for x, y in DELTA_TABLE[l]:
        out = out + TensorPoly.pure(NCPoly.gen(x), NCPoly.gen(y))
    return out


def delta_word(word) -> TensorPoly:
    out = TensorPoly.one(2)
    for l in word:
        out = out * _delta_letter(l)
    return out


@lru_cache(maxsize=None)
def _delta_mono(m: tuple) -> TensorPoly:
    return delta_word(mono_word(m))


def delta(p: Union[NCPoly, FreePoly]) -> TensorPoly:
    """Comultiplication, extended as a *-homomorphism."""
    out = TensorPoly(2)
    for w, c in _word_terms(p):
        img = delta_word(w) if isinstance(p, FreePoly) else _delta_mono(w)
        out = out + img * c
    return out


def kappa_word(word) -> NCPoly:
    out = NCPoly.const(1)
    for l in reversed(word):
        sign, img = KAPPA_TABLE[l]
        out = out * (NCPoly.gen(img) * sign)
    return out


@lru_cache(maxsize=None)
def _kappa_mono(m: tuple) -> NCPoly:
    return kappa_word(mono_word(m))


def kappa(p: Union[NCPoly, FreePoly]) -> NCPoly:
    """Coinverse, extended as an antihomomorphism."""
    out = NCPoly.zero()
    for w, c in _word_terms(p):
        img = kappa_word(w) if isinstance(p, FreePoly) else _kappa_mono(w)
        out = out + img * c
    return out


def epsilon(p: Union[NCPoly, FreePoly]) -> SCoeff:
    """Counit, extended as a homomorphism into the scalars."""
    total = SCoeff()
    for w, c in _word_terms(p):
        val = 1
        for l in (w if isinstance(p, FreePoly) else mono_word(w)):
            val *= EPS_TABLE[l]
        if val:
            total = total + c * val
    return total


def _word_terms(p):
    return p.terms().items()


def _leg_scalar(t: TensorPoly, leg: int) -> TensorPoly:
    """Apply the counit on one leg of a rank-2 tensor, returning a rank-1 tensor."""
    out: dict = {}
    for k, c in t.terms().items():
        e = epsilon(NCPoly({k[leg]: _ONE}, canonical=True))
        if e:
            rest = k[:leg] + k[leg + 1 :]
            prev = out.get(rest)
            v = c * e if prev is None else prev + c * e
            out[rest] = v
    return TensorPoly(t.rank - 1, out)


@dataclass
class HopfCheck:
    name: str
    group: str
    target: str
    passed: bool
    residual: str = "0"
    s_degree_ok: bool = True


@dataclass
class HopfReport:
    checks: list[HopfCheck] = field(default_factory=list)
    specialization: str | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def groups(self) -> dict[str, list[HopfCheck]]:
        out: dict[str, list[HopfCheck]] = {}
        for c in self.checks:
            out.setdefault(c.group, []).append(c)
        return out

    def failures(self) -> list[HopfCheck]:
        return [c for c in self.checks if not c.passed]


GROUPS = (
    "well-definedness",
    "coassociativity",
    "counit",
    "antipode",
    "coinverse-involution",
    "star-compatibility",
)


def check_hopf_axioms(n_random: int = 20, seed: int = 0, s_value=None) -> HopfReport:
    """Run the exact axiom battery.

    With ``s_value`` the residuals are specialized to that exact value of s
    before the zero test (``s_value=0`` is the classical coordinate algebra).
    """
    rng = random.Random(seed)
    report = HopfReport(specialization=None if s_value is None else str(s_value))

    def spec(x):
        if s_value is None:
            return x
        if isinstance(x, NCPoly):
            return x.subs_s(s_value)
        if isinstance(x, TensorPoly):
            return TensorPoly(x.rank, {k: c.subs(s_value) for k, c in x.terms().items()})
        if isinstance(x, SCoeff):
            return x.subs(s_value)
        return x

    def record(name, group, target, residual):
        r = spec(residual)
        zero = r.is_zero()
        report.checks.append(
            HopfCheck(name, group, target, zero, "0" if zero else r.to_str())
        )

    # (i) maps annihilate the defining relations, applied to the free words
    for rname, rel in ALL_RELATIONS:
        record(f"delta kills {rname}", GROUPS[0], rname, delta(rel))
        record(f"kappa kills {rname}", GROUPS[0], rname, kappa(rel))
        record(f"epsilon kills {rname}", GROUPS[0], rname, epsilon(rel))

    targets: list[tuple[str, NCPoly]] = [(LETTERS[g], NCPoly.gen(g)) for g in range(8)]
    for _ in range(n_random):
        w = random_word(rng, 3, 1)
        targets.append(("word " + "*".join(LETTERS[l] for l in w), normal_form(w)))

    for tname, x in targets:
        dx = delta(x)
        # (ii) coassociativity
        left = dx.leg_map(0, delta)
        right = dx.leg_map(1, delta)
        record(f"coassociativity on {tname}", GROUPS[1], tname, left - right)
        # (iii) counit laws
        xt = to_tensor1(x)
        record(f"(eps x id)delta on {tname}", GROUPS[2], tname, _leg_scalar(dx, 0) - xt)
        record(f"(id x eps)delta on {tname}", GROUPS[2], tname, _leg_scalar(dx, 1) - xt)
        # (iv) antipode laws
        ex = NCPoly.const(epsilon(x))
        record(
            f"m(kappa x id)delta on {tname}", GROUPS[3], tname,
            dx.leg_map(0, kappa).multiply_legs() - ex,
        )
        record(
            f"m(id x kappa)delta on {tname}", GROUPS[3], tname,
            dx.leg_map(1, kappa).multiply_legs() - ex,
        )
        # (v) kappa involutive and *-compatible
        record(f"kappa^2 on {tname}", GROUPS[4], tname, kappa(kappa(x)) - x)
        record(f"kappa(x*) = kappa(x)* on {tname}", GROUPS[4], tname,
               kappa(adjoint(x)) - adjoint(kappa(x)))
        record(f"eps o kappa on {tname}", GROUPS[4], tname, epsilon(kappa(x)) - epsilon(x))
        # (vi) delta commutes with the star
        record(f"delta(x*) = delta(x)* on {tname}", GROUPS[5], tname,
               delta(adjoint(x)) - dx.adjoint())
        eps_deg = epsilon(x).degree()
        if eps_deg > 0:
            report.checks.append(
                HopfCheck(f"eps s-degree on {tname}", GROUPS[2], tname, False,
                          epsilon(x).to_str(), False)
            )
    return report


def apply_on_generators(fn: Callable[[NCPoly], object]) -> dict[str, object]:
    return {LETTERS[g]: fn(NCPoly.gen(g)) for g in range(8)}
