"""Exact scalars: Gaussian rationals and polynomials in the deformation parameter s."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction, "GaussQ"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def _fmt_frac(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GaussQ:
    """Gaussian rational ``re + im*i`` with exact ``Fraction`` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussQ is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussQ":
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact")
        return cls(_frac(x), 0)

    def __repr__(self) -> str:
        return f"GaussQ({self})"

    def __str__(self) -> str:
        return self.to_str()

    def to_str(self) -> str:
        """Surface syntax, e.g. ``3/2``, ``-i``, ``1/2+3/2*i``."""
        re, im = self.re, self.im
        if im == 0:
            return _fmt_frac(re)
        if im == 1:
            ims = "i"
        elif im == -1:
            ims = "-i"
        else:
            ims = f"{_fmt_frac(im)}*i"
        if re == 0:
            return ims
        sign = "" if ims.startswith("-") else "+"
        return f"{_fmt_frac(re)}{sign}{ims}"

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussQ):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self) -> "GaussQ":
        return GaussQ(-self.re, -self.im)

    def __add__(self, other) -> "GaussQ":
        o = _gq(other)
        if o is None:
            return NotImplemented
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> "GaussQ":
        o = _gq(other)
        if o is None:
            return NotImplemented
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other) -> "GaussQ":
        o = _gq(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other) -> "GaussQ":
        o = _gq(other)
        if o is None:
            return NotImplemented
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussQ":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("GaussQ division by zero")
        return GaussQ(self.re / n, -self.im / n)

    def __truediv__(self, other) -> "GaussQ":
        o = _gq(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> "GaussQ":
        o = _gq(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> "GaussQ":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE_Q, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


def _gq(x):
    if isinstance(x, GaussQ):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussQ(x, 0)
    return None


ZERO_Q = GaussQ(0)
ONE_Q = GaussQ(1)
I_Q = GaussQ(0, 1)


class SCoeff:
    """Polynomial in s with Gaussian-rational coefficients; zero terms are never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Number] | None = None):
        clean = {}
        if terms:
            for k, v in terms.items():
                if k < 0:
                    raise ValueError("negative power of s")
                v = GaussQ.coerce(v)
                if v:
                    clean[int(k)] = v
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("SCoeff is immutable")

    @classmethod
    def const(cls, c: Number) -> "SCoeff":
        return cls({0: c})

    @classmethod
    def s_power(cls, k: int = 1, c: Number = 1) -> "SCoeff":
        return cls({k: c})

    @classmethod
    def _raw(cls, terms: dict) -> "SCoeff":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def coerce(cls, x) -> "SCoeff":
        if isinstance(x, SCoeff):
            return x
        return cls.const(x)

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max(self._terms) if self._terms else -1

    def __eq__(self, other) -> bool:
        if isinstance(other, SCoeff):
            return self._terms == other._terms
        o = _gq(other)
        if o is None:
            return NotImplemented
        return self == SCoeff.const(o)

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._terms.items())))
        return self._hash

    def __neg__(self) -> "SCoeff":
        return SCoeff._raw({k: -v for k, v in self._terms.items()})

    def __add__(self, other) -> "SCoeff":
        o = other if isinstance(other, SCoeff) else SCoeff.coerce(other)
        out = dict(self._terms)
        for k, v in o._terms.items():
            w = out.get(k)
            w = v if w is None else w + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return SCoeff._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "SCoeff":
        o = other if isinstance(other, SCoeff) else SCoeff.coerce(other)
        return self + (-o)

    def __rsub__(self, other) -> "SCoeff":
        return SCoeff.coerce(other) - self

    def __mul__(self, other) -> "SCoeff":
        if not isinstance(other, SCoeff):
            o = _gq(other)
            if o is None:
                return NotImplemented
            if not o:
                return SCoeff._raw({})
            return SCoeff._raw({k: v * o for k, v in self._terms.items()})
        out: dict = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                k = k1 + k2
                w = out.get(k)
                out[k] = v1 * v2 if w is None else w + v1 * v2
        return SCoeff._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SCoeff":
        out = SCoeff.const(1)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "SCoeff":
        """Complex conjugation; s is real."""
        return SCoeff._raw({k: v.conj() for k, v in self._terms.items()})

    def subs(self, value: Number) -> "SCoeff":
        """Substitute an exact value for s."""
        v = GaussQ.coerce(value)
        total = ZERO_Q
        for k, c in self._terms.items():
            total = total + c * v ** k
        return SCoeff.const(total)

    def constant(self) -> GaussQ:
        return self._terms.get(0, ZERO_Q)

    def evaluate(self, s: float) -> complex:
        return sum((complex(c) * s ** k for k, c in self._terms.items()), 0j)

    def __repr__(self) -> str:
        return f"SCoeff({self.to_str()})"

    def to_str(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, c in sorted(self._terms.items(), reverse=True):
            parts.append(format_term(c, [("s", k)] if k else []))
        return join_terms(parts)


def format_term(c: GaussQ, factors: Iterable[tuple[str, int]]) -> str:
    """Render ``c * f1^e1 * f2^e2 ...`` in surface syntax with a leading sign."""
    fs = [name if e == 1 else f"{name}^{e}" for name, e in factors if e]
    neg = False
    if c.im == 0:
        neg = c.re < 0
        mag = -c.re if neg else c.re
        cs = _fmt_frac(mag)
    elif c.re == 0:
        neg = c.im < 0
        mag = -c.im if neg else c.im
        cs = "i" if mag == 1 else f"{_fmt_frac(mag)}*i"
    else:
        cs = f"({c.to_str()})"
    if fs:
        body = "*".join(fs) if cs == "1" else cs + "*" + "*".join(fs)
    else:
        body = cs
    return ("-" if neg else "+") + body


def join_terms(parts: list[str]) -> str:
    if not parts:
        return "0"
    out = parts[0][1:] if parts[0][0] == "+" else "-" + parts[0][1:]
    for p in parts[1:]:
        out += f" {p[0]} {p[1:]}"
    return out
