"""Coordinate polynomials on SL(2,C), shear vector fields and the operators Op(x).

Coordinates are (a, b, c, d) for the matrix entries and a~, b~, c~, d~ for
their complex conjugates.  Polynomials are reduced modulo ``a*d = b*c + 1``
and its conjugate.

Differential operators are written over four *flow* fields that commute with
each other: the holomorphic left and right shear flows ``L``, ``R`` and their
conjugate-slot partners ``Lc``, ``Rc``.  The adjoint fields entering Op(x) are
expressed through these according to a :class:`Conventions` record, so every
convention setting lives in one operator algebra.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, asdict, replace
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .ncalg import det_reduce_block
from .scalars import GaussQ, SCoeff, format_term, join_terms

_ONE = SCoeff.const(1)


def _acc(out: dict, key, c: SCoeff) -> None:
    prev = out.get(key)
    v = c if prev is None else prev + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class _CommPoly:
    """Commutative polynomial over SCoeff; subclasses fix variables and reduction."""

    NAMES: tuple[str, ...] = ()
    LAURENT: frozenset = frozenset()

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean: dict = {}
        for m, c in (terms or {}).items():
            c = SCoeff.coerce(c)
            if not c:
                continue
            m = tuple(m)
            self._validate(m)
            for mm, k in self._reduce(m):
                _acc(clean, mm, c * k)
        self._terms = clean

    @classmethod
    def _validate(cls, m: tuple) -> None:
        if len(m) != len(cls.NAMES):
            raise ValueError("wrong number of exponents")
        for i, e in enumerate(m):
            if e < 0 and i not in cls.LAURENT:
                raise ValueError(f"negative exponent on {cls.NAMES[i]}")

    @staticmethod
    def _reduce(m: tuple):
        return ((m, 1),)

    @classmethod
    def _raw(cls, terms: dict):
        obj = object.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def const(cls, c):
        c = SCoeff.coerce(c)
        return cls._raw({(0,) * len(cls.NAMES): c} if c else {})

    @classmethod
    def var(cls, name: str, power: int = 1):
        e = [0] * len(cls.NAMES)
        e[cls.NAMES.index(name)] = power
        return cls({tuple(e): _ONE})

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> list:
        return sorted(self._terms.items(), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if type(other) is type(self):
            return self._terms == other._terms
        if isinstance(other, (int, GaussQ, SCoeff)):
            return self == type(self).const(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def _coerce(self, other):
        if type(other) is type(self):
            return other
        if isinstance(other, (int, Fraction, GaussQ, SCoeff)):
            return type(self).const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in o._terms.items():
            _acc(out, m, c)
        return type(self)._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                c = c1 * c2
                for mm, k in self._reduce(m):
                    _acc(out, mm, c * k)
        return type(self)._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = type(self).const(1)
        for _ in range(n):
            out = out * self
        return out

    def subs_s(self, value):
        return type(self)({m: c.subs(value) for m, c in self._terms.items()})

    def partial(self, i: int):
        out: dict = {}
        for m, c in self._terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                _acc(out, tuple(mm), c * m[i])
        return type(self)(out)

    def conj(self):
        """Complex conjugate: swaps each variable with its barred partner."""
        n = len(self.NAMES) // 2
        return type(self)(
            {m[n:] + m[:n]: c.conj() for m, c in self._terms.items()}
        )

    def has_vars(self, idx: Iterable[int]) -> bool:
        idx = list(idx)
        return any(any(m[i] for i in idx) for m in self._terms)

    def to_str(self) -> str:
        parts = []
        for m, c in self.items():
            factors = [(self.NAMES[i], e) for i, e in enumerate(m) if e]
            for k, v in sorted(c.terms().items(), reverse=True):
                parts.append(format_term(v, ([("s", k)] if k else []) + factors))
        return join_terms(parts)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_str()})"


class CoordPoly(_CommPoly):
    """Polynomial on SL(2,C) in a, b, c, d and conjugates, reduced by a*d = b*c + 1."""

    NAMES = ("a", "b", "c", "d", "a~", "b~", "c~", "d~")
    __slots__ = ()

    @staticmethod
    def _reduce(m: tuple):
        for u, cu in det_reduce_block(m[:4]):
            for v, cv in det_reduce_block(m[4:]):
                yield u + v, cu * cv

    def evaluate(self, a, c, d, s: float, b=None) -> np.ndarray:
        """Numerical values on the big cell; b defaults to (a*d - 1)/c."""
        a = np.asarray(a, dtype=complex)
        c = np.asarray(c, dtype=complex)
        d = np.asarray(d, dtype=complex)
        if b is None:
            if np.any(c == 0):
                raise ValueError("evaluation needs c != 0 to recover b")
            b = (a * d - 1) / c
        b = np.asarray(b, dtype=complex)
        vals = (a, b, c, d, a.conj(), b.conj(), c.conj(), d.conj())
        out = np.zeros(np.broadcast(a, b, c, d).shape, dtype=complex)
        for m, coef in self._terms.items():
            term = np.full(out.shape, coef.evaluate(s), dtype=complex)
            for v, e in zip(vals, m):
                if e:
                    term = term * v ** e
            out = out + term
        return out


class BorelPoly(_CommPoly):
    """Laurent polynomial on the Borel subgroup in a0^{+-1}, b0 and conjugates."""

    NAMES = ("a0", "b0", "a0~", "b0~")
    LAURENT = frozenset({0, 2})
    __slots__ = ()


def coord(name: str) -> CoordPoly:
    return CoordPoly.var(name)


def borel(name: str, power: int = 1) -> BorelPoly:
    return BorelPoly.var(name, power)


# ---------------------------------------------------------------------------
# Derivations


class Derivation:
    """First-order derivation given by its values on the coordinate functions."""

    __slots__ = ("coeffs", "poly_type")

    def __init__(self, poly_type, coeffs: Sequence):
        if len(coeffs) != len(poly_type.NAMES):
            raise ValueError("one coefficient per variable required")
        self.poly_type = poly_type
        self.coeffs = tuple(poly_type.const(0) + c for c in coeffs)

    def __call__(self, f):
        return self.apply(f)

    def apply(self, f):
        out = self.poly_type.zero()
        for i, v in enumerate(self.coeffs):
            if v:
                out = out + f.partial(i) * v
        return out

    def __mul__(self, k) -> "Derivation":
        return Derivation(self.poly_type, [c * k for c in self.coeffs])

    __rmul__ = __mul__

    def __neg__(self) -> "Derivation":
        return self * -1

    def __add__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.poly_type, [x + y for x, y in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self + (-other)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def conj(self) -> "Derivation":
        """Conjugate-slot partner: acts on the barred variables with conjugated coefficients."""
        n = len(self.coeffs) // 2
        cs = [c.conj() for c in self.coeffs]
        return Derivation(self.poly_type, cs[n:] + cs[:n])

    def __eq__(self, other) -> bool:
        return isinstance(other, Derivation) and self.coeffs == other.coeffs


def bracket(v: Derivation, w: Derivation) -> Derivation:
    return Derivation(v.poly_type, [v(wc) - w(vc) for vc, wc in zip(v.coeffs, w.coeffs)])


def _zero_vec(pt) -> list:
    return [pt.zero() for _ in pt.NAMES]


def left_flow() -> Derivation:
    """2 d/dz f(g_z^{-1} g) for the shear g_z = [[1,z],[0,1]]: a -> a - z c, b -> b - z d."""
    v = _zero_vec(CoordPoly)
    v[0] = coord("c") * -2
    v[1] = coord("d") * -2
    return Derivation(CoordPoly, v)


def right_flow() -> Derivation:
    """2 d/dz f(g g_z): b -> b + z a, d -> d + z c."""
    v = _zero_vec(CoordPoly)
    v[1] = coord("a") * 2
    v[3] = coord("c") * 2
    return Derivation(CoordPoly, v)


def borel_left_flow() -> Derivation:
    """Left shear on [[a0, b0], [0, 1/a0]]: b0 -> b0 - z/a0."""
    v = _zero_vec(BorelPoly)
    v[1] = borel("a0", -1) * -2
    return Derivation(BorelPoly, v)


def borel_right_flow() -> Derivation:
    """Right shear on the Borel subgroup: b0 -> b0 + z a0."""
    v = _zero_vec(BorelPoly)
    v[1] = borel("a0") * 2
    return Derivation(BorelPoly, v)


FLOW_NAMES = ("L", "Lc", "R", "Rc")


def flow_fields() -> tuple[Derivation, ...]:
    l, r = left_flow(), right_flow()
    return (l, l.conj(), r, r.conj())


def borel_flow_fields() -> tuple[Derivation, ...]:
    l, r = borel_left_flow(), borel_right_flow()
    return (l, l.conj(), r, r.conj())


# ---------------------------------------------------------------------------
# Conventions for the adjoint fields


@dataclass(frozen=True)
class Conventions:
    """How the adjoint fields are realized.

    ``l_sign``/``r_sign`` multiply the chosen flow, ``l_slot``/``r_slot`` pick
    the conjugate-slot flow ("conj") or the holomorphic flow itself ("holo").
    The defaults are the ones singled out by calibration.
    """

    l_sign: int = -1
    r_sign: int = -1
    l_slot: str = "conj"
    r_slot: str = "conj"

    def __post_init__(self):
        for sgn in (self.l_sign, self.r_sign):
            if sgn not in (1, -1):
                raise ValueError("signs must be +1 or -1")
        for slot in (self.l_slot, self.r_slot):
            if slot not in ("conj", "holo"):
                raise ValueError("slot must be 'conj' or 'holo'")

    def adjoint_field(self, side: str) -> dict[tuple, int]:
        """The adjoint field as a combination of flow monomials."""
        if side == "l":
            idx = 1 if self.l_slot == "conj" else 0
            return {_e(idx): self.l_sign}
        if side == "r":
            idx = 3 if self.r_slot == "conj" else 2
            return {_e(idx): self.r_sign}
        raise ValueError(side)

    def flipped(self, toggle: str) -> "Conventions":
        if toggle in ("l_sign", "r_sign"):
            return replace(self, **{toggle: -getattr(self, toggle)})
        if toggle in ("l_slot", "r_slot"):
            cur = getattr(self, toggle)
            return replace(self, **{toggle: "holo" if cur == "conj" else "conj"})
        raise ValueError(toggle)

    def as_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def all_settings() -> list["Conventions"]:
        return [
            Conventions(ls, rs, lo, ro)
            for ls, rs, lo, ro in itertools.product((-1, 1), (-1, 1), ("conj", "holo"), ("conj", "holo"))
        ]


DEFAULT_CONVENTIONS = Conventions()


def _e(i: int) -> tuple:
    e = [0, 0, 0, 0]
    e[i] = 1
    return tuple(e)


# ---------------------------------------------------------------------------
# Differential operators


class DiffOp:
    """Finite sum  coefficient(x) * L^i Lc^j R^k Rc^l  over commuting flow fields."""

    __slots__ = ("poly_type", "fields", "_terms")

    def __init__(self, poly_type, fields: Sequence[Derivation], terms: Mapping[tuple, object] | None = None):
        self.poly_type = poly_type
        self.fields = tuple(fields)
        clean: dict = {}
        for m, c in (terms or {}).items():
            c = poly_type.const(0) + c
            if c:
                prev = clean.get(tuple(m))
                v = c if prev is None else prev + c
                if v:
                    clean[tuple(m)] = v
                else:
                    clean.pop(tuple(m))
        self._terms = clean

    def _new(self, terms) -> "DiffOp":
        return DiffOp(self.poly_type, self.fields, terms)

    @classmethod
    def multiplication(cls, f, fields: Sequence[Derivation]) -> "DiffOp":
        return cls(type(f), fields, {(0, 0, 0, 0): f})

    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def order(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def __add__(self, other: "DiffOp") -> "DiffOp":
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out[m] + c if m in out else c
        return self._new(out)

    def __neg__(self) -> "DiffOp":
        return self._new({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, f) -> "DiffOp":
        """Left multiplication by a function or scalar."""
        return self._new({m: f * c for m, c in self._terms.items()})

    def field_power(self, m: tuple, f):
        for idx, e in enumerate(m):
            for _ in range(e):
                f = self.fields[idx](f)
        return f

    def apply(self, f):
        out = self.poly_type.zero()
        for m, c in self._terms.items():
            out = out + c * self.field_power(m, f)
        return out

    __call__ = apply

    def compose(self, other: "DiffOp") -> "DiffOp":
        """self o other, via the multi-index Leibniz rule."""
        out: dict = {}
        for m, p in self._terms.items():
            for n, q in other._terms.items():
                for j in itertools.product(*(range(k + 1) for k in m)):
                    binom = 1
                    for mk, jk in zip(m, j):
                        binom *= comb(mk, jk)
                    dq = self.field_power(j, q)
                    if not dq:
                        continue
                    key = tuple(mk - jk + nk for mk, jk, nk in zip(m, j, n))
                    term = p * dq * binom
                    out[key] = out[key] + term if key in out else term
        return self._new(out)

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other)

    def subs_s(self, value) -> "DiffOp":
        return self._new({m: c.subs_s(value) for m, c in self._terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffOp) and self._terms == other._terms

    def to_str(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in sorted(self._terms.items()):
            fs = "".join(
                f"{FLOW_NAMES[i]}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e
            )
            parts.append(f"({c.to_str()})" + (f"*{fs}" if fs else ""))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"DiffOp({self.to_str()})"


def _quarter_s(k: int = 1) -> SCoeff:
    return SCoeff({k: Fraction(1, 4 ** k)})


def _adj_op(poly_type, fields, conv: Conventions, side: str) -> DiffOp:
    return DiffOp(poly_type, fields, {m: poly_type.const(c) for m, c in conv.adjoint_field(side).items()})


def build_op(which: str, conventions: Conventions = DEFAULT_CONVENTIONS) -> DiffOp:
    """Op(a), Op(d), Op(b) on SL(2,C) or Op(b0) on the Borel subgroup.

    ``which`` accepts "alpha"/"a", "delta"/"d", "beta"/"b", "beta0"/"b0" and "gamma"/"c".
    """
    key = {"a": "alpha", "d": "delta", "b": "beta", "b0": "beta0", "c": "gamma"}.get(which, which)
    if key == "beta0":
        pt, fields = BorelPoly, borel_flow_fields()
        lstar = _adj_op(pt, fields, conventions, "l")
        rstar = _adj_op(pt, fields, conventions, "r")
        base = DiffOp.multiplication(borel("b0"), fields)
        return (
            base
            - lstar.scale(borel("a0", -1) * _quarter_s())
            - rstar.scale(borel("a0") * _quarter_s())
        )
    pt, fields = CoordPoly, flow_fields()
    lstar = _adj_op(pt, fields, conventions, "l")
    rstar = _adj_op(pt, fields, conventions, "r")
    mult = lambda name: DiffOp.multiplication(coord(name), fields)
    if key == "alpha":
        return mult("a") - lstar.scale(coord("c") * _quarter_s())
    if key == "delta":
        return mult("d") - rstar.scale(coord("c") * _quarter_s())
    if key == "gamma":
        return mult("c")
    if key == "beta":
        return (
            mult("b")
            - lstar.scale(coord("d") * _quarter_s())
            - rstar.scale(coord("a") * _quarter_s())
            + (lstar @ rstar).scale(coord("c") * _quarter_s(2))
        )
    raise ValueError(f"unknown operator {which!r}")


@dataclass
class DeterminantResult:
    passed: bool
    residual: DiffOp
    conventions: dict

    def __bool__(self) -> bool:
        return self.passed


def verify_determinant_identity(
    conventions: Conventions = DEFAULT_CONVENTIONS,
    alpha_conventions: Conventions | None = None,
    s_value=None,
) -> DeterminantResult:
    """Check Op(a) o Op(d) - c * Op(b) = 1 as an exact operator identity.

    ``alpha_conventions`` builds Op(a) alone under different toggles, which is
    how the negative control mixes conventions.
    """
    op_a = build_op("alpha", alpha_conventions or conventions)
    op_d = build_op("delta", conventions)
    op_b = build_op("beta", conventions)
    fields = op_a.fields
    one = DiffOp.multiplication(CoordPoly.const(1), fields)
    residual = op_a @ op_d - op_b.scale(coord("c")) - one
    if s_value is not None:
        residual = residual.subs_s(s_value)
    return DeterminantResult(residual.is_zero(), residual, conventions.as_dict())


def apply_field(v, f):
    """Apply a flow field, a Derivation or an adjoint-field DiffOp to f."""
    if isinstance(v, str):
        v = named_field(v)
    if isinstance(v, Derivation):
        return v(f)
    if isinstance(v, DiffOp):
        return v(f)
    raise TypeError(f"not a field: {v!r}")


def named_field(name: str, conventions: Conventions = DEFAULT_CONVENTIONS):
    """'l', 'r' give the flows; 'l*', 'r*' the adjoint fields under ``conventions``."""
    fields = flow_fields()
    if name == "l":
        return fields[0]
    if name == "r":
        return fields[2]
    if name in ("l*", "r*"):
        return _adj_op(CoordPoly, fields, conventions, name[0])
    raise ValueError(f"unknown field {name!r}")


def fields_commute() -> dict[str, bool]:
    fl = flow_fields()
    out = {}
    for i, j in itertools.combinations(range(4), 2):
        out[f"[{FLOW_NAMES[i]},{FLOW_NAMES[j]}]"] = bracket(fl[i], fl[j]).is_zero()
    return out


# ---------------------------------------------------------------------------
# Borel restriction


def restrict_to_borel(obj):
    """Pull back along the inclusion of upper-triangular matrices.

    c -> 0, d -> 1/a0, a -> a0, b -> b0 (and conjugates).  Accepts CoordPoly,
    Derivation or DiffOp.
    """
    if isinstance(obj, CoordPoly):
        return _restrict_poly(obj)
    if isinstance(obj, Derivation):
        return _restrict_field(obj)
    if isinstance(obj, DiffOp):
        bf = tuple(_restrict_field(v) for v in obj.fields)
        ref = borel_flow_fields()
        for got, want in zip(bf, ref):
            if got != want:
                raise ValueError("restricted flows differ from the Borel flows")
        return DiffOp(BorelPoly, ref, {m: _restrict_poly(c) for m, c in obj.terms().items()})
    raise TypeError(type(obj))


def _restrict_poly(f: CoordPoly) -> BorelPoly:
    out: dict = {}
    for m, c in f.terms().items():
        a, b, cc, d, ab, bb, cb, db = m
        if cc or cb:
            continue
        _acc(out, (a - d, b, ab - db, bb), c)
    return BorelPoly(out)


def _restrict_field(v: Derivation) -> Derivation:
    ca, cb, cc, cd, cab, cbb, ccb, cdb = (_restrict_poly(x) for x in v.coeffs)
    a0inv2 = borel("a0", -2)
    a0binv2 = borel("a0~", -2)
    if cc or ccb:
        raise ValueError("field is not tangent to the Borel subgroup (moves c)")
    if cd != -(a0inv2 * ca) or cdb != -(a0binv2 * cab):
        raise ValueError("field is not tangent to the Borel subgroup (d != 1/a)")
    return Derivation(BorelPoly, [ca, cb, cab, cbb])


# ---------------------------------------------------------------------------
# Random polynomials


def random_coordpoly(rng: random.Random, n_terms: int = 4, max_exp: int = 2, s_degree: int = 1) -> CoordPoly:
    out = CoordPoly.zero()
    for _ in range(n_terms):
        m = tuple(rng.randint(0, max_exp) if rng.random() < 0.4 else 0 for _ in range(8))
        c = SCoeff({k: GaussQ(rng.randint(-3, 3), rng.randint(-3, 3)) for k in range(s_degree + 1)})
        out = out + CoordPoly({m: c})
    return out


# ---------------------------------------------------------------------------
# Polynomial x Gaussian test functions and the grid layer


@dataclass(frozen=True)
class GaussianTestFunction:
    """F = P * exp(q) with q = -(wa |a|^2 + wc |c|^2 + wd |d|^2)."""

    P: CoordPoly
    wa: Fraction = Fraction(1)
    wc: Fraction = Fraction(1)
    wd: Fraction = Fraction(1)

    def __post_init__(self):
        if min(self.wa, self.wc, self.wd) <= 0:
            raise ValueError("Gaussian weights must be positive")

    @property
    def exponent(self) -> CoordPoly:
        def sq(x):
            return coord(x) * coord(x + "~")
        return -(sq("a") * self.wa + sq("c") * self.wc + sq("d") * self.wd)

    def apply_field(self, v: Derivation) -> "GaussianTestFunction":
        return replace(self, P=v(self.P) + self.P * v(self.exponent))

    def apply_op(self, op: DiffOp) -> "GaussianTestFunction":
        total = CoordPoly.zero()
        for m, c in op.terms().items():
            g = self
            for idx, e in enumerate(m):
                for _ in range(e):
                    g = g.apply_field(op.fields[idx])
            total = total + c * g.P
        return replace(self, P=total)

    def evaluate(self, a, c, d, s: float) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        c = np.asarray(c, dtype=complex)
        d = np.asarray(d, dtype=complex)
        gauss = np.exp(-(float(self.wa) * abs(a) ** 2 + float(self.wc) * abs(c) ** 2 + float(self.wd) * abs(d) ** 2))
        return self.P.evaluate(a, c, d, s) * gauss


@dataclass(frozen=True)
class GridSpec:
    """Per complex axis (a, c, d): center, half-width and nodes per real direction."""

    centers: tuple[complex, complex, complex] = (0.3 + 0.1j, 0.8 - 0.4j, -0.2 + 0.5j)
    half_widths: tuple[float, float, float] = (0.6, 0.3, 0.6)
    nodes: tuple[int, int, int] = (3, 3, 3)

    def axis(self, k: int) -> np.ndarray:
        n = self.nodes[k]
        u = np.linspace(-1.0, 1.0, n) if n > 1 else np.zeros(1)
        x, y = np.meshgrid(u, u, indexing="ij")
        return (self.centers[k] + self.half_widths[k] * (x + 1j * y)).ravel()

    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        a, c, d = np.meshgrid(self.axis(0), self.axis(1), self.axis(2), indexing="ij")
        a, c, d = a.ravel(), c.ravel(), d.ravel()
        if np.any(np.abs(c) == 0):
            raise ValueError("grid contains c = 0, outside the big cell")
        return a, c, d


def numeric_grid_eval(f, grid: GridSpec, s: float = 1.0) -> np.ndarray:
    """Evaluate a CoordPoly, GaussianTestFunction or callable f(a, c, d) on the grid."""
    a, c, d = grid.points()
    if isinstance(f, (CoordPoly, GaussianTestFunction)):
        return f.evaluate(a, c, d, s)
    if callable(f):
        return np.asarray(f(a, c, d), dtype=complex)
    raise TypeError(type(f))


def l2u_action(which: str, s: float, z: complex, t: float, f: Callable, a, c, d) -> np.ndarray:
    """Coordinate action of the one-parameter Heisenberg unitaries on a function f(a, c, d)."""
    g2 = np.abs(c) ** 2
    if which == "alpha":
        return (np.exp(-1j * s * t / 4 * g2) * np.exp(1j * (z * a).imag)
                * f(a - s / 4 * np.conj(z) * g2, c, d))
    if which == "delta":
        return (np.exp(1j * s * t / 4 * g2) * np.exp(1j * (z * d).imag)
                * f(a, c, d + s / 4 * np.conj(z) * g2))
    raise ValueError(which)


def fd_dz(fn: Callable[[complex], np.ndarray], h: float) -> np.ndarray:
    """Central-difference Wirtinger derivative 2 d/dz at z = 0."""
    dx = (fn(h) - fn(-h)) / (2 * h)
    dy = (fn(1j * h) - fn(-1j * h)) / (2 * h)
    return dx - 1j * dy


@dataclass
class L2UReport:
    s: float
    h: float
    residual_alpha: float
    residual_delta: float
    scale: float
    conventions: dict

    @property
    def residual(self) -> float:
        return max(self.residual_alpha, self.residual_delta)


def default_testfn() -> GaussianTestFunction:
    P = coord("a") * coord("c~") + coord("d~") * GaussQ(0, 1) + coord("a~") * coord("d") + 1
    return GaussianTestFunction(P, Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))


def l2u_derivative_check(
    s: float,
    testfn: GaussianTestFunction | None = None,
    grid: GridSpec | None = None,
    h: float = 1e-3,
    conventions: Conventions = DEFAULT_CONVENTIONS,
) -> L2UReport:
    """Finite-difference generator of the coordinate action vs Op(a)f and Op(d)f."""
    if testfn is None:
        testfn = default_testfn()
    if not isinstance(testfn, GaussianTestFunction):
        raise TypeError("test function must be polynomial x Gaussian")
    grid = grid or GridSpec()
    a, c, d = grid.points()
    f = lambda aa, cc, dd: testfn.evaluate(aa, cc, dd, s)
    out = {}
    for which in ("alpha", "delta"):
        fd = fd_dz(lambda z: l2u_action(which, s, z, 0.0, f, a, c, d), h)
        exact = testfn.apply_op(build_op(which, conventions)).evaluate(a, c, d, s)
        out[which] = float(np.max(np.abs(fd - exact)))
    scale = float(np.max(np.abs(f(a, c, d))))
    return L2UReport(s, h, out["alpha"], out["delta"], scale, conventions.as_dict())


@dataclass
class CalibrationRow:
    conventions: Conventions
    determinant: bool
    l2u_residual: float
    passed: bool


def calibrate_conventions(s: float = 1.0, h: float = 1e-3, tol: float = 1e-5) -> list[CalibrationRow]:
    """Enumerate all toggle settings against both arbiters."""
    rows = []
    for conv in Conventions.all_settings():
        det = verify_determinant_identity(conv).passed
        res = l2u_derivative_check(s, h=h, conventions=conv).residual
        rows.append(CalibrationRow(conv, det, res, det and res <= tol))
    return rows
