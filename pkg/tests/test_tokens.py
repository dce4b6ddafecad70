# tests/test_tokens.py
import pytest

from core.errors import DecodeError, UnsupportedNode
from symbolic.canon import canonicalize
from symbolic.expr import FIELD, Binary, Const, Deriv, Equation, Unary
from symbolic.parser import parse_expr, parse_infix
from symbolic.tokens import (
    Dialect, TokenSeq, encode, format_float, from_tokens, parse_token_text, to_canonical_tokens, to_manual_tokens,
)

GOLDEN_MANUAL = ("+", "cos", "×", "1.5", "x_1", "−", "pow", "x_2", "2", "2.6")
KDV_CANONICAL = (
    "+",
    "×", "1", "u(x,t)", "∂", "(", "u(x,t)", ",", "x", ")",
    "×", "1", "∂", "(", "u(x,t)", ",", "t", ")",
    "×", "0.0484", "∂", "(", "u(x,t)", ",", "(", "x", ",", "3", ")", ")",
)


def test_manual_golden_sequence():
    seq = to_manual_tokens(parse_expr("cos(1.5*x_1) + (x_2^2 - 2.6)"))
    assert seq.tokens == GOLDEN_MANUAL
    assert seq.bracketed() == "[+ cos × 1.5 x_1 − pow x_2 2 2.6]"


def test_manual_golden_decodes():
    decoded = from_tokens(TokenSeq(Dialect.MANUAL, GOLDEN_MANUAL))
    assert decoded.residual == parse_expr("cos(1.5*x_1) + (x_2^2 - 2.6)")


def test_manual_tokens_keep_stored_order():
    seq = to_manual_tokens(parse_infix("u_t + 0.5*u*u_x - 0.01*u_xx = 0"))
    assert seq.tokens == ("−", "+", "u_t", "×", "0.5", "×", "u", "u_x", "×", "0.01", "u_xx")


def test_manual_single_constant():
    assert to_manual_tokens(parse_expr("2.6")).tokens == ("2.6",)


def test_manual_rejects_high_order_derivative():
    with pytest.raises(UnsupportedNode):
        to_manual_tokens(Deriv(FIELD, "x", 4))


def test_kdv_canonical_sequence():
    seq = to_canonical_tokens(parse_infix("u*u_x + u_t + 0.0484*u_xxx = 0"))
    assert seq.tokens == KDV_CANONICAL
    text = seq.text()
    assert "∂ ( u(x,t) , ( x , 3 ) )" in text


def test_single_term_has_no_root_sum():
    assert to_canonical_tokens(parse_expr("u_t")).tokens == ("×", "1", "∂", "(", "u(x,t)", ",", "t", ")")


def test_burgers_float_tokens():
    seq = to_canonical_tokens(parse_infix("u_t + 0.5*u*u_x + 0.01*u_xx = 0"))
    assert "0.500" in seq.tokens
    assert "0.0100" in seq.tokens


def test_zero_residual():
    assert to_canonical_tokens(parse_expr("u - u")).tokens == ("×", "0")


@pytest.mark.parametrize("value, dialect, text", [
    (0.5, Dialect.CANONICAL, "0.500"),
    (0.01, Dialect.CANONICAL, "0.0100"),
    (1e-5, Dialect.CANONICAL, "1.00e-05"),
    (0.955, Dialect.CANONICAL, "0.955"),
    (1.5, Dialect.MANUAL, "1.5"),
    (2.0, Dialect.MANUAL, "2.0"),
])
def test_format_float(value, dialect, text):
    assert format_float(value, dialect) == text


@pytest.mark.parametrize("src", [
    "u*u_x + u_t + 0.0484*u_xxx",
    "u_t + 0.5*(u^2)_x - 0.01*u_xx",
    "u_t + 0.955*cos(u)*u_x",
    "[?]*u_t + [?]*cos(u)*u_x",
    "u_t - 2*u_xx + 3",
])
def test_canonical_round_trip(src):
    e = parse_expr(src)
    decoded = from_tokens(to_canonical_tokens(e))
    assert decoded.residual == canonicalize(e)


@pytest.mark.parametrize("src", [
    "cos(1.5*x_1) + (x_2^2 - 2.6)",
    "u_t + 0.5*u*u_x - 0.01*u_xx",
    "u_t - sin(u)/x",
])
def test_manual_round_trip(src):
    e = parse_expr(src)
    assert from_tokens(to_manual_tokens(e)).residual == e


@pytest.mark.parametrize("tokens, dialect", [
    (("+", "×", "1"), Dialect.CANONICAL),
    (("+", "×", "1"), Dialect.MANUAL),
    (("foo",), Dialect.MANUAL),
    (("u_y",), Dialect.MANUAL),
    (("×", "1", "∂", "(", "u(x,t)", ",", "x"), Dialect.CANONICAL),
    (("×", "1", "∂", "(", "u(x,t)", ",", "y", ")"), Dialect.CANONICAL),
    (("∂", "(", "u(x,t)", ",", "x", ")"), Dialect.MANUAL),
    (("u", "u"), Dialect.MANUAL),
    ((), Dialect.CANONICAL),
])
def test_malformed_sequences(tokens, dialect):
    with pytest.raises(DecodeError):
        from_tokens(TokenSeq(dialect, tokens))


def test_parse_token_text_strips_brackets():
    seq = parse_token_text("[+ cos × 1.5 x_1 − pow x_2 2 2.6]", "manual")
    assert seq.tokens == GOLDEN_MANUAL
    assert parse_token_text("[?] u", "manual").tokens == ("[?]", "u")


def test_encode_dispatch():
    eq = Equation(parse_expr("u_t + u*u_x"))
    assert encode(eq, "manual") == to_manual_tokens(eq)
    assert encode(eq, Dialect.CANONICAL) == to_canonical_tokens(eq)


def _round_floats(e):
    """Все Const округлены до трёх значащих цифр, как в каноническом диалекте."""
    if isinstance(e, Const):
        return Const(float(f"{e.value:.3g}"))
    if isinstance(e, Unary):
        return Unary(e.fn, _round_floats(e.child))
    if isinstance(e, Binary):
        return Binary(e.op, _round_floats(e.left), _round_floats(e.right))
    return e


def test_canonical_round_trip_random_trees(random_tree):
    for seed in range(1000):
        e = random_tree(seed)
        decoded = from_tokens(to_canonical_tokens(e))
        expected = canonicalize(_round_floats(canonicalize(e)))
        assert canonicalize(decoded.residual) == expected, f"seed={seed}: {e}"


def test_manual_round_trip_random_trees(random_tree):
    for seed in range(1000):
        e = random_tree(seed)
        assert from_tokens(to_manual_tokens(e)).residual == e, f"seed={seed}: {e}"
