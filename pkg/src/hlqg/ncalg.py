"""Noncommutative *-polynomials in a, b, c, d and their adjoints.

Canonical monomials are exponent vectors over the ordered letters
``a < b < c < d < a' < b' < c' < d'``: all unstarred letters first (they
commute among themselves), then all starred letters, and never ``a`` together
with ``d`` (or ``a'`` with ``d'``) since ``a*d = b*c + 1``.

Reduction happens in two stages.  Stage one moves starred letters to the right
of unstarred ones with the oriented mixed rules in ``RULES``.  Stage two
eliminates ``a``/``d`` co-occurrences inside each commutative block.
"""

from __future__ import annotations

import random
import threading
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .scalars import GaussQ, SCoeff, format_term, join_terms

LETTERS = ("a", "b", "c", "d", "a'", "b'", "c'", "d'")
GREEK = ("α", "β", "γ", "δ", "α*", "β*", "γ*", "δ*")
A, B, C, D, AS, BS, CS, DS = range(8)

Mono = tuple  # 8 exponents
Word = tuple  # letter indices

ONE_MONO: Mono = (0,) * 8
_ONE = SCoeff.const(1)
_S = SCoeff.s_power(1)

MAX_DEPTH = 400


class RewriteError(RuntimeError):
    """Raised when the rewriting recursion exceeds its depth guard."""


def is_starred(letter: int) -> bool:
    return letter >= 4


def star(letter: int) -> int:
    return letter - 4 if letter >= 4 else letter + 4


def unit(letter: int) -> Mono:
    e = [0] * 8
    e[letter] = 1
    return tuple(e)


# Oriented mixed rules: (starred x, unstarred y) -> x*y as a sum of words.
# Correction words may themselves be star-before-unstar; they are reduced
# recursively.  Letter weight strictly drops along b'b -> a'a -> c'c -> cc'.
_c1 = _ONE
RULES: dict[tuple[int, int], tuple[tuple[SCoeff, Word], ...]] = {
    (AS, A): ((_c1, (A, AS)), (_S, (CS, C))),
    (AS, B): ((_c1, (B, AS)), (_S, (D, CS))),
    (AS, C): ((_c1, (C, AS)),),
    (AS, D): ((_c1, (D, AS)),),
    (BS, A): ((_c1, (A, BS)), (_S, (C, DS))),
    (BS, B): ((_c1, (B, BS)), (-_S, (AS, A)), (_S, (D, DS))),
    (BS, C): ((_c1, (C, BS)),),
    (BS, D): ((_c1, (D, BS)), (-_S, (AS, C))),
    (CS, A): ((_c1, (A, CS)),),
    (CS, B): ((_c1, (B, CS)),),
    (CS, C): ((_c1, (C, CS)),),
    (CS, D): ((_c1, (D, CS)),),
    (DS, A): ((_c1, (A, DS)),),
    (DS, B): ((_c1, (B, DS)), (-_S, (CS, A))),
    (DS, C): ((_c1, (C, DS)),),
    (DS, D): ((_c1, (D, DS)), (-_S, (C, CS))),
}


class _Guard(threading.local):
    depth = 0


_guard = _Guard()


def _add4(x: tuple, y: tuple) -> tuple:
    return (x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3])


def _dec(x: tuple, i: int) -> tuple:
    lst = list(x)
    lst[i] -= 1
    return tuple(lst)


def _e4(i: int) -> tuple:
    lst = [0, 0, 0, 0]
    lst[i] = 1
    return tuple(lst)


def _acc(out: dict, key, c: SCoeff) -> None:
    prev = out.get(key)
    v = c if prev is None else prev + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


@lru_cache(maxsize=None)
def _reorder(S: tuple, U: tuple) -> tuple:
    """Rewrite the word S*U (starred block then unstarred block) as sum U'*S'."""
    if not any(S) or not any(U):
        return (((U, S), _ONE),)
    _guard.depth += 1
    try:
        if _guard.depth > MAX_DEPTH:
            raise RewriteError(f"rewrite depth limit exceeded at S={S}, U={U}")
        x = max(i for i in range(4) if S[i])
        y = min(i for i in range(4) if U[i])
        S1, U1 = _dec(S, x), _dec(U, y)
        out: dict = {}
        for c, word in RULES[(x + 4, y)]:
            for (u, sw), c1 in _canon_pair(word):
                for (u2, s2), c2 in _reorder(S1, u):
                    for (u3, s3), c3 in _reorder(_add4(s2, sw), U1):
                        _acc(out, (_add4(u2, u3), s3), c * c1 * c2 * c3)
        return tuple(out.items())
    finally:
        _guard.depth -= 1


def _canon_pair(word: Word) -> tuple:
    l1, l2 = word
    if is_starred(l1) and not is_starred(l2):
        return _reorder(_e4(l1 - 4), _e4(l2))
    u = [0, 0, 0, 0]
    s = [0, 0, 0, 0]
    for l in word:
        if is_starred(l):
            s[l - 4] += 1
        else:
            u[l] += 1
    return (((tuple(u), tuple(s)), _ONE),)


@lru_cache(maxsize=None)
def det_reduce_block(e: tuple) -> tuple:
    """Apply a*d -> b*c + 1 inside one commutative block; returns ((exps, int), ...)."""
    a, b, c, d = e
    k = min(a, d)
    if k == 0:
        return ((e, 1),)
    return tuple(((a - k, b + j, c + j, d - k), comb(k, j)) for j in range(k + 1))


@lru_cache(maxsize=None)
def mul_mono(m1: Mono, m2: Mono) -> tuple:
    """Canonical product of two canonical monomials as ((mono, SCoeff), ...)."""
    U1, S1 = m1[:4], m1[4:]
    U2, S2 = m2[:4], m2[4:]
    out: dict = {}
    for (u, s), c in _reorder(S1, U2):
        for uu, cu in det_reduce_block(_add4(U1, u)):
            for ss, cs in det_reduce_block(_add4(s, S2)):
                _acc(out, uu + ss, c * (cu * cs))
    return tuple(out.items())


def reduce_mono(m: Mono) -> tuple:
    """Stage-two reduction of a (possibly non-reduced) exponent vector."""
    out = []
    for uu, cu in det_reduce_block(tuple(m[:4])):
        for ss, cs in det_reduce_block(tuple(m[4:])):
            out.append((uu + ss, cu * cs))
    return tuple(out)


def mono_str(m: Mono) -> str:
    return "*".join(
        LETTERS[i] if e == 1 else f"{LETTERS[i]}^{e}" for i, e in enumerate(m) if e
    ) or "1"


def mono_word(m: Mono) -> Word:
    return tuple(i for i in range(8) for _ in range(m[i]))


def mono_degree(m: Mono) -> int:
    return sum(m)


class NCPoly:
    """Canonical element of the generator algebra: map canonical monomial -> SCoeff."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Mono, SCoeff] | None = None, *, canonical: bool = False):
        clean: dict = {}
        if terms:
            for m, c in terms.items():
                c = SCoeff.coerce(c)
                if not c:
                    continue
                m = tuple(m)
                if len(m) != 8 or min(m) < 0:
                    raise ValueError(f"bad exponent vector {m}")
                if canonical:
                    _acc(clean, m, c)
                else:
                    for mm, k in reduce_mono(m):
                        _acc(clean, mm, c * k)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "NCPoly":
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls) -> "NCPoly":
        return cls._raw({})

    @classmethod
    def const(cls, c) -> "NCPoly":
        c = SCoeff.coerce(c)
        return cls._raw({ONE_MONO: c} if c else {})

    @classmethod
    def s(cls) -> "NCPoly":
        return cls.const(_S)

    @classmethod
    def gen(cls, letter: Union[int, str]) -> "NCPoly":
        idx = LETTERS.index(letter) if isinstance(letter, str) else letter
        return cls._raw({unit(idx): _ONE})

    @classmethod
    def mono(cls, m: Mono, c=1) -> "NCPoly":
        return cls({tuple(m): SCoeff.coerce(c)})

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> list:
        """Terms in deterministic order (descending lexicographic monomial)."""
        return sorted(self._terms.items(), reverse=True)

    def __iter__(self) -> Iterator:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, NCPoly):
            return self._terms == other._terms
        if isinstance(other, (int, GaussQ, SCoeff)):
            return self == NCPoly.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __neg__(self) -> "NCPoly":
        return NCPoly._raw({m: -c for m, c in self._terms.items()})

    def __add__(self, other) -> "NCPoly":
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in o._terms.items():
            _acc(out, m, c)
        return NCPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "NCPoly":
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "NCPoly":
        o = _as_poly(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            return mul(self, other)
        if isinstance(other, (int, GaussQ, SCoeff)):
            c = SCoeff.coerce(other)
            return NCPoly._raw({m: v * c for m, v in self._terms.items() if v * c})
        return NotImplemented

    def __rmul__(self, other) -> "NCPoly":
        if isinstance(other, (int, GaussQ, SCoeff)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int) -> "NCPoly":
        out = NCPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def s_degree(self) -> int:
        return max((c.degree() for c in self._terms.values()), default=-1)

    def subs_s(self, value) -> "NCPoly":
        return NCPoly({m: c.subs(value) for m, c in self._terms.items()}, canonical=True)

    def adjoint(self) -> "NCPoly":
        return adjoint(self)

    def to_str(self) -> str:
        parts = []
        for m, c in self.items():
            letters = [(LETTERS[i], e) for i, e in enumerate(m) if e]
            for k, v in sorted(c.terms().items(), reverse=True):
                parts.append(format_term(v, ([("s", k)] if k else []) + letters))
        return join_terms(parts)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"NCPoly({self.to_str()})"


def _as_poly(x):
    if isinstance(x, NCPoly):
        return x
    if isinstance(x, (int, GaussQ, SCoeff)):
        return NCPoly.const(x)
    return None


def mul(p: NCPoly, q: NCPoly) -> NCPoly:
    out: dict = {}
    for m1, c1 in p._terms.items():
        for m2, c2 in q._terms.items():
            c12 = c1 * c2
            for m, c in mul_mono(m1, m2):
                _acc(out, m, c12 * c)
    return NCPoly._raw(out)


def adjoint(p: NCPoly) -> NCPoly:
    """Antilinear antimultiplicative involution.

    For a canonical monomial U*S the adjoint is S^* U^*, which is again in
    canonical order (the starred block of U^* follows the unstarred S^*), so no
    rewriting is needed.
    """
    return NCPoly._raw({m[4:] + m[:4]: c.conj() for m, c in p._terms.items()})


class FreePoly:
    """Element of the free algebra on the eight letters (words are not reduced)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, SCoeff] | None = None):
        clean: dict = {}
        for w, c in (terms or {}).items():
            _acc(clean, tuple(w), SCoeff.coerce(c))
        self._terms = clean

    @classmethod
    def word(cls, word: Sequence[Union[int, str]], c=1) -> "FreePoly":
        w = tuple(LETTERS.index(x) if isinstance(x, str) else x for x in word)
        return cls({w: SCoeff.coerce(c)})

    @classmethod
    def const(cls, c) -> "FreePoly":
        return cls({(): SCoeff.coerce(c)})

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> list:
        return sorted(self._terms.items())

    def __add__(self, other: "FreePoly") -> "FreePoly":
        out = dict(self._terms)
        for w, c in other._terms.items():
            _acc(out, w, c)
        return FreePoly._from(out)

    def __neg__(self) -> "FreePoly":
        return FreePoly._from({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "FreePoly") -> "FreePoly":
        return self + (-other)

    def __mul__(self, other) -> "FreePoly":
        if isinstance(other, FreePoly):
            out: dict = {}
            for w1, c1 in self._terms.items():
                for w2, c2 in other._terms.items():
                    _acc(out, w1 + w2, c1 * c2)
            return FreePoly._from(out)
        c = SCoeff.coerce(other)
        return FreePoly({w: v * c for w, v in self._terms.items()})

    __rmul__ = __mul__

    @classmethod
    def _from(cls, terms: dict) -> "FreePoly":
        obj = object.__new__(cls)
        obj._terms = terms
        return obj

    def adjoint(self) -> "FreePoly":
        return FreePoly(
            {tuple(star(l) for l in reversed(w)): c.conj() for w, c in self._terms.items()}
        )

    def to_str(self) -> str:
        parts = []
        for w, c in self.items():
            letters = [(LETTERS[l], 1) for l in w]
            for k, v in sorted(c.terms().items(), reverse=True):
                parts.append(format_term(v, ([("s", k)] if k else []) + letters))
        return join_terms(parts)

    def __repr__(self) -> str:
        return f"FreePoly({self.to_str()})"


def word_poly(word: Iterable[int], fold: str = "left") -> NCPoly:
    """Canonical form of a single word, multiplying letter by letter."""
    letters = [NCPoly.gen(l) for l in word]
    if not letters:
        return NCPoly.const(1)
    if fold == "left":
        acc = letters[0]
        for g in letters[1:]:
            acc = acc * g
    elif fold == "right":
        acc = letters[-1]
        for g in reversed(letters[:-1]):
            acc = g * acc
    else:
        raise ValueError(f"unknown fold {fold!r}")
    return acc


def normal_form(p: Union[NCPoly, FreePoly, Word], fold: str = "left") -> NCPoly:
    """Canonical representative of ``p`` modulo the defining relations."""
    if isinstance(p, NCPoly):
        return NCPoly(p._terms)
    if isinstance(p, tuple):
        p = FreePoly({p: _ONE})
    out = NCPoly.zero()
    for w, c in p.items():
        out = out + word_poly(w, fold) * c
    return out


# ---------------------------------------------------------------------------
# Independent oracle: plain string rewriting on words.


def _find_redex(w: Word, strategy: str):
    idx = range(len(w) - 1) if strategy == "leftmost" else range(len(w) - 2, -1, -1)
    for i in idx:
        x, y = w[i], w[i + 1]
        if is_starred(x) and not is_starred(y):
            return i
        if is_starred(x) == is_starred(y) and x > y:
            return i
    return None


def rewrite_normal_form(p: Union[FreePoly, Word], strategy: str = "leftmost") -> NCPoly:
    """Reduce by single-step rewriting, one redex at a time.

    Shares only the rule table with ``normal_form``; the control flow and the
    determinant step (one ``a*d`` pair at a time) are independent.
    """
    if strategy not in ("leftmost", "rightmost"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if isinstance(p, tuple):
        p = FreePoly({p: _ONE})
    pending = dict(p.terms())
    done: dict = {}
    steps = 0
    while pending:
        w, c = pending.popitem()
        steps += 1
        if steps > 10_000_000:
            raise RewriteError("rewrite step limit exceeded")
        i = _find_redex(w, strategy)
        if i is not None:
            x, y = w[i], w[i + 1]
            if is_starred(x) != is_starred(y):
                for c2, repl in RULES[(x, y)]:
                    _acc(pending, w[:i] + repl + w[i + 2 :], c * c2)
            else:
                _acc(pending, w[:i] + (y, x) + w[i + 2 :], c)
            continue
        replaced = False
        for lo, hi, mid in ((A, D, (B, C)), (AS, DS, (BS, CS))):
            if lo in w and hi in w:
                rest = list(w)
                rest.remove(lo)
                rest.remove(hi)
                _acc(pending, tuple(sorted(rest + list(mid))), c)
                _acc(pending, tuple(rest), c)
                replaced = True
                break
        if not replaced:
            _acc(done, w, c)
    out: dict = {}
    for w, c in done.items():
        m = [0] * 8
        for l in w:
            m[l] += 1
        _acc(out, tuple(m), c)
    return NCPoly._raw(out)


# ---------------------------------------------------------------------------
# Relations as written (free-algebra form, one side moved over).


def _w(spec: str) -> FreePoly:
    """Tiny helper: '+a*b' style word with leading sign and optional s factor."""
    sign = -1 if spec[0] == "-" else 1
    body = spec[1:] if spec[0] in "+-" else spec
    toks = body.split("*")
    c = SCoeff.const(sign)
    letters = []
    for t in toks:
        if t == "s":
            c = c * _S
        elif t == "1":
            continue
        else:
            letters.append(LETTERS.index(t))
    return FreePoly({tuple(letters): c})


def _rel(*specs: str) -> FreePoly:
    out = FreePoly()
    for sp in specs:
        out = out + _w(sp)
    return out


DISPLAYED_RELATIONS: tuple[tuple[str, FreePoly], ...] = (
    ("det", _rel("a*d", "-b*c", "-1")),
    ("ab", _rel("a*b", "-b*a")),
    ("ac", _rel("a*c", "-c*a")),
    ("ad", _rel("a*d", "-d*a")),
    ("bc", _rel("b*c", "-c*b")),
    ("bd", _rel("b*d", "-d*b")),
    ("cd", _rel("c*d", "-d*c")),
    ("aa*", _rel("a*a'", "-a'*a", "+s*c'*c")),
    ("ab*", _rel("a*b'", "-b'*a", "+s*c*d'")),
    ("ac*", _rel("a*c'", "-c'*a")),
    ("ad*", _rel("a*d'", "-d'*a")),
    ("bb*", _rel("b*b'", "-b'*b", "-s*a'*a", "+s*d*d'")),
    ("bc*", _rel("b*c'", "-c'*b")),
    ("bd*", _rel("b*d'", "-d'*b", "-s*c'*a")),
    ("cc*", _rel("c*c'", "-c'*c")),
    ("cd*", _rel("c*d'", "-d'*c")),
    ("dd*", _rel("d*d'", "-d'*d", "-s*c*c'")),
)

_SELF_ADJOINT = {"aa*", "bb*", "cc*", "dd*"}

ADJOINT_RELATIONS: tuple[tuple[str, FreePoly], ...] = tuple(
    (f"({name})*", rel.adjoint()) for name, rel in DISPLAYED_RELATIONS if name not in _SELF_ADJOINT
)

ALL_RELATIONS = DISPLAYED_RELATIONS + ADJOINT_RELATIONS

def determinant_element() -> NCPoly:
    """a*d - b*c written monomially (its canonical form is the constant 1)."""
    return NCPoly({(1, 0, 0, 1, 0, 0, 0, 0): 1, (0, 1, 1, 0, 0, 0, 0, 0): -1}, canonical=True)


def is_central(p: NCPoly) -> bool:
    return all(commutator(p, NCPoly.gen(g)).is_zero() for g in range(8))


def commutator(p: NCPoly, q: NCPoly) -> NCPoly:
    return p * q - q * p


def generators() -> list[NCPoly]:
    return [NCPoly.gen(g) for g in range(8)]


def random_word(rng: random.Random, max_degree: int = 4, min_degree: int = 0) -> Word:
    n = rng.randint(min_degree, max_degree)
    return tuple(rng.randrange(8) for _ in range(n))


def random_scalar(rng: random.Random) -> GaussQ:
    return GaussQ(rng.randint(-3, 3), rng.randint(-2, 2))


def random_poly(rng: random.Random, n_terms: int = 3, max_degree: int = 3, s_degree: int = 1) -> NCPoly:
    out = NCPoly.zero()
    for _ in range(n_terms):
        c = SCoeff({k: random_scalar(rng) for k in range(s_degree + 1)})
        out = out + word_poly(random_word(rng, max_degree)) * c
    return out


# ---------------------------------------------------------------------------
# Tensor powers.


class TensorPoly:
    """Element of the r-fold tensor power; each leg is a canonical monomial."""

    __slots__ = ("rank", "_terms")

    def __init__(self, rank: int, terms: Mapping[tuple, SCoeff] | None = None):
        if rank < 1:
            raise ValueError("rank must be positive")
        self.rank = rank
        clean: dict = {}
        for legs, c in (terms or {}).items():
            if len(legs) != rank:
                raise ValueError("leg count does not match rank")
            _acc(clean, tuple(tuple(m) for m in legs), SCoeff.coerce(c))
        self._terms = clean

    @classmethod
    def _raw(cls, rank: int, terms: dict) -> "TensorPoly":
        obj = object.__new__(cls)
        obj.rank = rank
        obj._terms = terms
        return obj

    @classmethod
    def one(cls, rank: int) -> "TensorPoly":
        return cls._raw(rank, {(ONE_MONO,) * rank: _ONE})

    @classmethod
    def pure(cls, *legs: NCPoly) -> "TensorPoly":
        out = {(): _ONE}
        for leg in legs:
            nxt: dict = {}
            for k, c in out.items():
                for m, cm in leg._terms.items():
                    _acc(nxt, k + (m,), c * cm)
            out = nxt
        return cls._raw(len(legs), out)

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> list:
        return sorted(self._terms.items(), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, TensorPoly):
            return self.rank == other.rank and self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.rank, frozenset(self._terms.items())))

    def __add__(self, other: "TensorPoly") -> "TensorPoly":
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            _acc(out, k, c)
        return TensorPoly._raw(self.rank, out)

    def __neg__(self) -> "TensorPoly":
        return TensorPoly._raw(self.rank, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "TensorPoly") -> "TensorPoly":
        return self + (-other)

    def __mul__(self, other) -> "TensorPoly":
        if isinstance(other, TensorPoly):
            self._check(other)
            out: dict = {}
            for k1, c1 in self._terms.items():
                for k2, c2 in other._terms.items():
                    partial = {(): c1 * c2}
                    for m1, m2 in zip(k1, k2):
                        nxt: dict = {}
                        prods = mul_mono(m1, m2)
                        for pk, pc in partial.items():
                            for m, c in prods:
                                _acc(nxt, pk + (m,), pc * c)
                        partial = nxt
                    for k, c in partial.items():
                        _acc(out, k, c)
            return TensorPoly._raw(self.rank, out)
        if isinstance(other, (int, GaussQ, SCoeff)):
            c = SCoeff.coerce(other)
            return TensorPoly(self.rank, {k: v * c for k, v in self._terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def _check(self, other: "TensorPoly") -> None:
        if self.rank != other.rank:
            raise ValueError("tensor ranks differ")

    def adjoint(self) -> "TensorPoly":
        """Leg-wise adjoint."""
        return TensorPoly._raw(
            self.rank,
            {tuple(m[4:] + m[:4] for m in k): c.conj() for k, c in self._terms.items()},
        )

    def leg_map(self, leg: int, fn) -> "TensorPoly":
        """Apply a linear map NCPoly -> NCPoly | TensorPoly on one leg."""
        out: dict = {}
        new_rank = None
        for k, c in self._terms.items():
            img = fn(NCPoly._raw({k[leg]: _ONE}))
            if isinstance(img, TensorPoly):
                r = img.rank
                parts = img._terms.items()
            elif isinstance(img, NCPoly):
                r = 1
                parts = (((m,), cm) for m, cm in img._terms.items())
            else:
                r = 0
                parts = (((), SCoeff.coerce(img)),)
            new_rank = self.rank - 1 + r
            for sub, cs in parts:
                _acc(out, k[:leg] + tuple(sub) + k[leg + 1 :], c * cs)
        if new_rank is None:
            new_rank = self.rank
        if new_rank == 0:
            raise ValueError("leg map collapsed every leg; use TensorPoly.scalar")
        return TensorPoly._raw(new_rank, out)

    def multiply_legs(self) -> NCPoly:
        """Multiplication map: product of the legs in order."""
        out = NCPoly.zero()
        for k, c in self._terms.items():
            prod = NCPoly._raw({k[0]: c})
            for m in k[1:]:
                prod = prod * NCPoly._raw({m: _ONE})
            out = out + prod
        return out

    def to_str(self) -> str:
        parts = []
        for k, c in self.items():
            legs = " (x) ".join(mono_str(m) for m in k)
            for p, v in sorted(c.terms().items(), reverse=True):
                pref = format_term(v, [("s", p)] if p else [])
                sign, body = pref[0], pref[1:]
                body = "" if body == "1" else body + "*"
                parts.append(sign + body + (f"({legs})" if self.rank > 1 else legs))
        return join_terms(parts)

    def __repr__(self) -> str:
        return f"TensorPoly[{self.rank}]({self.to_str()})"


def to_tensor1(p: NCPoly) -> TensorPoly:
    return TensorPoly._raw(1, {(m,): c for m, c in p._terms.items()})
