"""Surface syntax for generator-algebra elements.

Grammar (one-token lookahead)::

    tensor  := sum ("(x)" sum)*
    sum     := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := postfix ("^" INT)?
    postfix := atom "'"*
    atom    := INT | "a" | "b" | "c" | "d" | "s" | "i" | "(" tensor ")"

``'`` is the adjoint, ``(x)`` separates tensor legs and binds loosest, and
``/`` only accepts a nonzero s-free scalar on its right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .ncalg import ONE_MONO, LETTERS, NCPoly, TensorPoly, adjoint, to_tensor1
from .scalars import GaussQ, SCoeff

Value = Union[NCPoly, TensorPoly]


class ParseError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"syntax error at column {column}: {message}")
        self.column = column
        self.reason = message


class UnknownIdentifier(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # INT, ID, OP, TENSOR, EOF
    text: str
    col: int


_TOKEN_RE = re.compile(r"\s*(?:(\(x\))|(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")
_OPS = set("+-*/^()'")
_NAMES = {"a", "b", "c", "d", "s", "i"}


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:  # only trailing whitespace left
            break
        tens, num, ident, op = m.groups()
        col = m.start(m.lastindex) if m.lastindex else m.start()
        pos = m.end()
        if tens:
            out.append(Token("TENSOR", tens, col))
        elif num:
            out.append(Token("INT", num, col))
        elif ident:
            if ident not in _NAMES:
                raise UnknownIdentifier(f"unknown identifier {ident!r}", col)
            out.append(Token("ID", ident, col))
        elif op is not None:
            if op.isspace():
                continue
            if op not in _OPS:
                raise ParseError(f"unexpected character {op!r}", col)
            out.append(Token("OP", op, col))
    out.append(Token("EOF", "", len(text)))
    return out


# ---------------------------------------------------------------- AST

@dataclass(frozen=True)
class Num:
    value: int
    col: int = 0


@dataclass(frozen=True)
class Name:
    name: str
    col: int = 0


@dataclass(frozen=True)
class Star:
    arg: "Expr"
    col: int = 0


@dataclass(frozen=True)
class Neg:
    arg: "Expr"
    col: int = 0


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int
    col: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * / (x)
    left: "Expr"
    right: "Expr"
    col: int = 0


Expr = Union[Num, Name, Star, Neg, Pow, BinOp]

_PREC = {"(x)": 0, "+": 1, "-": 1, "*": 2, "/": 2}


def expr_str(e: Expr) -> str:
    """Print an AST back in surface syntax, parenthesizing only where needed."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Star):
        return _atomic(e.arg) + "'"
    if isinstance(e, Neg):
        inner = expr_str(e.arg)
        return "-" + (f"({inner})" if isinstance(e.arg, BinOp) and _PREC[e.arg.op] < 2 else inner)
    if isinstance(e, Pow):
        return f"{_atomic(e.base)}^{e.exp}"
    p = _PREC[e.op]
    sep = " (x) " if e.op == "(x)" else (f" {e.op} " if p == 1 else e.op)
    left = expr_str(e.left)
    if isinstance(e.left, BinOp) and _PREC[e.left.op] < p:
        left = f"({left})"
    right = expr_str(e.right)
    if isinstance(e.right, BinOp) and _PREC[e.right.op] <= p or isinstance(e.right, Neg):
        right = f"({right})"
    return left + sep + right


def _atomic(e: Expr) -> str:
    t = expr_str(e)
    return t if isinstance(e, (Num, Name, Star)) else f"({t})"


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text in ops

    def fail(self, what: str):
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"expected {what}, found {found}", t.col)

    def parse(self) -> Expr:
        e = self.tensor()
        if self.tok.kind != "EOF":
            self.fail("operator or end of input")
        return e

    def tensor(self) -> Expr:
        e = self.sum()
        while self.tok.kind == "TENSOR":
            col = self.advance().col
            e = BinOp("(x)", e, self.sum(), col)
        return e

    def sum(self) -> Expr:
        e = self.term()
        while self.at_op("+", "-"):
            t = self.advance()
            e = BinOp(t.text, e, self.term(), t.col)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.at_op("*", "/"):
            t = self.advance()
            e = BinOp(t.text, e, self.unary(), t.col)
        return e

    def unary(self) -> Expr:
        if self.at_op("-"):
            col = self.advance().col
            return Neg(self.unary(), col)
        if self.at_op("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        e = self.postfix()
        if self.at_op("^"):
            col = self.advance().col
            if self.tok.kind != "INT":
                self.fail("integer exponent")
            e = Pow(e, int(self.advance().text), col)
        return e

    def postfix(self) -> Expr:
        e = self.atom()
        while self.at_op("'"):
            e = Star(e, self.advance().col)
        return e

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return Num(int(t.text), t.col)
        if t.kind == "ID":
            self.advance()
            return Name(t.text, t.col)
        if self.at_op("("):
            self.advance()
            e = self.tensor()
            if not self.at_op(")"):
                self.fail("')'")
            self.advance()
            return e
        self.fail("operand")


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


# ---------------------------------------------------------------- evaluation

def _scalar_of(p: NCPoly) -> SCoeff | None:
    t = p.terms()
    if not t:
        return SCoeff()
    if set(t) == {ONE_MONO}:
        return t[ONE_MONO]
    return None


def _tensor_concat(x: Value, y: Value) -> TensorPoly:
    x = to_tensor1(x) if isinstance(x, NCPoly) else x
    y = to_tensor1(y) if isinstance(y, NCPoly) else y
    out: dict = {}
    for k1, c1 in x.terms().items():
        for k2, c2 in y.terms().items():
            k = k1 + k2
            out[k] = out[k] + c1 * c2 if k in out else c1 * c2
    return TensorPoly(x.rank + y.rank, out)


def _lift(v: Value, rank: int, col: int) -> Value:
    if isinstance(v, TensorPoly):
        if v.rank != rank:
            raise ParseError(f"tensor rank mismatch ({v.rank} vs {rank})", col)
        return v
    if rank == 1:
        return v
    c = _scalar_of(v)
    if c is None:
        raise ParseError("cannot combine a tensor with a non-scalar element", col)
    return TensorPoly.one(rank) * c


def _rank(v: Value) -> int:
    return v.rank if isinstance(v, TensorPoly) else 1


def evaluate(e: Expr) -> Value:
    if isinstance(e, Num):
        return NCPoly.const(e.value)
    if isinstance(e, Name):
        if e.name == "s":
            return NCPoly.s()
        if e.name == "i":
            return NCPoly.const(GaussQ(0, 1))
        return NCPoly.gen(LETTERS.index(e.name))
    if isinstance(e, Star):
        v = evaluate(e.arg)
        return v.adjoint() if isinstance(v, TensorPoly) else adjoint(v)
    if isinstance(e, Neg):
        return -evaluate(e.arg)
    if isinstance(e, Pow):
        v = evaluate(e.base)
        out = _lift(NCPoly.const(1), _rank(v), e.col)
        for _ in range(e.exp):
            out = out * v
        return out
    x, y = evaluate(e.left), evaluate(e.right)
    if e.op == "(x)":
        return _tensor_concat(x, y)
    if e.op == "/":
        c = _scalar_of(y) if isinstance(y, NCPoly) else None
        if c is None or c.degree() > 0 or not c:
            raise ParseError("divisor must be a nonzero number", e.col)
        inv = c.constant().inverse()
        return x * inv if isinstance(x, TensorPoly) else x * NCPoly.const(inv)
    r = max(_rank(x), _rank(y))
    if e.op == "*" and r > 1 and (_rank(x) == 1 or _rank(y) == 1):
        # scalar times tensor
        s_ = _scalar_of(x if _rank(x) == 1 else y)
        if s_ is None:
            raise ParseError("cannot multiply a tensor by a non-scalar element", e.col)
        return (y if _rank(x) == 1 else x) * s_
    x, y = _lift(x, r, e.col), _lift(y, r, e.col)
    if e.op == "+":
        return x + y
    if e.op == "-":
        return x - y
    return x * y


def parse(text: str) -> Value:
    """Parse and canonicalize; returns an NCPoly, or a TensorPoly when ``(x)`` occurs."""
    return evaluate(parse_expr(text))


def to_text(v: Value) -> str:
    return v.to_str()
