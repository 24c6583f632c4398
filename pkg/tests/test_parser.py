import pytest
from hypothesis import given, settings

from hlqg import ParseError, delta, normal_form, parse
from hlqg.ncalg import DISPLAYED_RELATIONS, NCPoly, TensorPoly
from hlqg.parser import BinOp, Name, Neg, Num, Pow, Star, UnknownIdentifier, expr_str, parse_expr, tokenize

from strategies import polys


@pytest.mark.parametrize("text,expected", [
    ("a*d", "b*c + 1"),
    ("d*a", "b*c + 1"),
    ("(a+b)^2", "a^2 + 2*a*b + b^2"),
    ("a/2", "1/2*a"),
    ("-(a-b)", "-a + b"),
    ("2*i*c^2 + s*b", "s*b + 2*i*c^2"),
    ("a'' - a", "0"),
    ("+a - +a", "0"),
    ("3/6", "1/2"),
    ("a*d - b*c - 1", "0"),
    ("a'*a - a*a' - s*c'*c", "0"),
    ("3/4+1/2*i", "(3/4+1/2*i)"),
])
def test_examples(text, expected):
    assert parse(text).to_str() == expected


def test_adjoint_binds_tighter_than_power():
    assert parse("a'^2") == parse("a'*a'")
    assert parse("(a*b)'") == parse("b'*a'")


def test_precedence():
    assert parse_expr("a+b*c") == BinOp("+", Name("a", 0), BinOp("*", Name("b", 2), Name("c", 4), 3), 1)
    assert isinstance(parse_expr("-a^2"), Neg)
    assert isinstance(parse_expr("a'^2"), Pow)


def test_relations_vanish():
    for name, rel in DISPLAYED_RELATIONS:
        assert normal_form(rel).is_zero(), name


def test_determinant_text():
    assert parse("a*d - b*c").to_str() == "1"
    assert parse("d*a - c*b").to_str() == "1"


@settings(max_examples=200)
@given(polys())
def test_roundtrip_canonical(p):
    q = normal_form(p)
    assert parse(q.to_str()) == q


@given(polys(max_terms=2, max_degree=2))
def test_roundtrip_ast_printer(p):
    text = normal_form(p).to_str()
    e = parse_expr(text)
    assert parse_expr(expr_str(e)) == parse_expr(expr_str(parse_expr(expr_str(e))))
    assert parse(expr_str(e)) == parse(text)


def test_tensor_text():
    d = parse("(c (x) a) + (d (x) c)")
    assert isinstance(d, TensorPoly) and d.rank == 2
    assert d == delta(NCPoly.gen(2))
    assert parse(d.to_str()) == d


def test_tensor_binds_loosest():
    t = parse("c (x) a + d (x) c")
    assert t.rank == 3
    assert t == parse("c (x) (a + d) (x) c")


def test_tensor_scalar_mixing():
    assert parse("2*(a (x) b)") == parse("(a (x) b)*2")
    assert parse("(a (x) b)/2") == parse("1/2*(a (x) b)")
    assert parse("(a (x) b) + 1") == parse("(a (x) b) + (1 (x) 1)")


@pytest.mark.parametrize("text,col", [
    ("((", 2),
    ("a +", 3),
    ("a * * b", 4),
    ("a ^ b", 4),
    ("(a + b", 6),
    ("a b", 2),
    ("a # b", 2),
    ("", 0),
])
def test_error_columns(text, col):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.column == col
    assert str(exc.value).startswith(f"syntax error at column {col}:")


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as exc:
        parse("x*a")
    assert exc.value.column == 0
    with pytest.raises(UnknownIdentifier):
        parse("a*alpha")


@pytest.mark.parametrize("text", ["a/b", "a/0", "a/s", "(a (x) b)*c", "(a (x) b) + c", "(a (x) b) + (a (x) b (x) c)"])
def test_semantic_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_tokenize_columns():
    toks = tokenize("  a'*(b)")
    assert [(t.kind, t.col) for t in toks] == [("ID", 2), ("OP", 3), ("OP", 4), ("OP", 5), ("ID", 6), ("OP", 7), ("EOF", 8)]
    assert tokenize("a (x) b")[1].kind == "TENSOR"
