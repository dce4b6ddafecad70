# /symbolic/parser.py
"""
Разбор инфиксной записи уравнений (рекурсивный спуск).

Грамматика:
    equation := expr ("=" expr)?
    expr     := term (("+"|"-") term)*
    term     := factor (("*"|"/") factor)*
    factor   := "-" factor | base ("^" "-"? int)?
    base     := number | ident | "[?]" | func "(" expr ")" | "(" expr ")" ("_" ("t"|"x"{1..3}))?

Сложение и вычитание левоассоциативны, цепочки умножения собираются
справа налево: k*u*u_x -> mul(k, mul(u, u_x)).
"""
import logging
import math
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from core.errors import InfixSyntaxError, UnknownSymbol
from symbolic.expr import (
    FIELD, PLACEHOLDER, Binary, Const, Deriv, Equation, Expr, Int, Unary, Var,
)

logger = logging.getLogger("symfilter_symbolic")

FUNCTIONS = ("sin", "cos")
SHORTHANDS = {
    "u_t": ("t", 1),
    "u_x": ("x", 1),
    "u_xx": ("x", 2),
    "u_xxx": ("x", 3),
}
VARIABLE_RE = re.compile(r"^[A-Za-z](?:_\d+)?$")
_SUFFIX_RE = re.compile(r"^_(t|x{1,3})$")

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<placeholder>\[\?\])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()=])"
    r")"
)

# Юникодные знаки из статей и подписей к рисункам
_UNICODE_REPLACEMENTS = {"−": "-", "×": "*", "·": "*", "÷": "/"}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def normalize_shorthand(src: str) -> str:
    """Заменяет юникодные знаки операций на ASCII."""
    for old, new in _UNICODE_REPLACEMENTS.items():
        src = src.replace(old, new)
    return src


def _byte_offset(src: str, index: int) -> int:
    return len(src[:index].encode("utf-8"))


def _tokenize(src: str) -> List[_Token]:
    tokens = []
    index = 0
    while index < len(src):
        if src[index:].strip() == "":
            break
        match = _TOKEN_RE.match(src, index)
        if match is None or match.end() == index:
            stripped = len(src[index:]) - len(src[index:].lstrip())
            raise InfixSyntaxError(f"Недопустимый символ '{src[index + stripped]}'",
                                   _byte_offset(src, index + stripped))
        kind = match.lastgroup
        text = match.group(kind)
        tokens.append(_Token(kind, text, _byte_offset(src, match.start(kind))))
        index = match.end()
    return tokens


def _ends_operand(tok: _Token) -> bool:
    if tok.kind in ("number", "placeholder"):
        return True
    if tok.kind == "ident":
        return tok.text not in FUNCTIONS
    return tok.text == ")"


def _starts_operand(tok: _Token) -> bool:
    if tok.kind in ("number", "placeholder"):
        return True
    if tok.kind == "ident":
        return not tok.text.startswith("_")
    return tok.text == "("


def _insert_implicit_products(tokens: List[_Token]) -> List[_Token]:
    """Вставляет '*' между соседними операндами: '0.955 cos(u)u_x' -> '0.955*cos(u)*u_x'."""
    result: List[_Token] = []
    for tok in tokens:
        if result and _ends_operand(result[-1]) and _starts_operand(tok):
            result.append(_Token("op", "*", tok.offset))
        result.append(tok)
    return result


class _Parser:
    def __init__(self, tokens: List[_Token], src: str):
        self.tokens = tokens
        self.pos = 0
        self.end_offset = len(src.encode("utf-8"))

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise InfixSyntaxError("Неожиданный конец выражения", self.end_offset)
        self.pos += 1
        return tok

    def at_op(self, *symbols: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.text in symbols

    def expect_op(self, symbol: str) -> _Token:
        tok = self.peek()
        if tok is None:
            raise InfixSyntaxError(f"Ожидалось '{symbol}', выражение закончилось", self.end_offset)
        if tok.kind != "op" or tok.text != symbol:
            raise InfixSyntaxError(f"Ожидалось '{symbol}', получено '{tok.text}'", tok.offset)
        self.pos += 1
        return tok

    # expr := term (("+"|"-") term)*
    def expression(self) -> Expr:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            right = self.term()
            node = Binary("add" if op == "+" else "sub", node, right)
        return node

    # term := factor (("*"|"/") factor)*
    def term(self) -> Expr:
        run = [self.factor()[0]]
        while self.at_op("*", "/"):
            op = self.advance().text
            operand = self.factor()[0]
            if op == "*":
                run.append(operand)
            else:
                run = [Binary("div", _fold_right(run), operand)]
        return _fold_right(run)

    def factor(self) -> Tuple[Expr, bool]:
        """Возвращает узел и признак «голого» числового литерала."""
        if self.at_op("-"):
            self.advance()
            inner, is_literal = self.factor()
            if is_literal and isinstance(inner, Int):
                return Int(-inner.value), True
            if is_literal and isinstance(inner, Const):
                return Const(-inner.value), True
            return Unary("neg", inner), False
        node, is_literal = self.base()
        if self.at_op("^"):
            caret = self.advance()
            negative = False
            if self.at_op("-"):
                self.advance()
                negative = True
            tok = self.peek()
            if tok is None or tok.kind != "number":
                raise InfixSyntaxError("После '^' ожидался целый показатель", caret.offset)
            if not re.fullmatch(r"\d+", tok.text):
                raise InfixSyntaxError(f"Нецелый показатель степени '{tok.text}' не поддерживается", tok.offset)
            self.advance()
            exponent = int(tok.text)
            return Binary("pow", node, Int(-exponent if negative else exponent)), False
        return node, is_literal

    def base(self) -> Tuple[Expr, bool]:
        tok = self.advance()
        if tok.kind == "number":
            if re.fullmatch(r"\d+", tok.text):
                return Int(int(tok.text)), True
            value = float(tok.text)
            if not math.isfinite(value):
                raise InfixSyntaxError(f"Число '{tok.text}' вне диапазона конечных значений", tok.offset)
            return Const(value), True
        if tok.kind == "placeholder":
            return PLACEHOLDER, False
        if tok.kind == "ident":
            return self.identifier(tok), False
        if tok.text == "(":
            inner = self.expression()
            self.expect_op(")")
            nxt = self.peek()
            if nxt is not None and nxt.kind == "ident" and nxt.text.startswith("_"):
                match = _SUFFIX_RE.match(nxt.text)
                if match is None:
                    raise InfixSyntaxError(f"Неверный индекс производной '{nxt.text}'", nxt.offset)
                self.advance()
                letters = match.group(1)
                return Deriv(inner, letters[0], len(letters)), False
            return inner, False
        raise InfixSyntaxError(f"Неожиданный символ '{tok.text}'", tok.offset)

    def identifier(self, tok: _Token) -> Expr:
        name = tok.text
        if name == "u":
            return FIELD
        if name in SHORTHANDS:
            var, order = SHORTHANDS[name]
            return Deriv(FIELD, var, order)
        if name in FUNCTIONS:
            self.expect_op("(")
            child = self.expression()
            self.expect_op(")")
            return Unary(name, child)
        if VARIABLE_RE.match(name) and not name.startswith("u"):
            return Var(name)
        raise UnknownSymbol(name, tok.offset)


def _fold_right(items: List[Expr]) -> Expr:
    result = items[-1]
    for item in reversed(items[:-1]):
        result = Binary("mul", item, result)
    return result


def _is_zero_literal(e: Expr) -> bool:
    return isinstance(e, (Int, Const)) and e.value == 0


def parse_expr(src: str, implicit_mul: bool = False) -> Expr:
    """Разбирает выражение без знака '='."""
    eq = parse_infix(src, implicit_mul=implicit_mul)
    return eq.residual


def parse_infix(src: str, implicit_mul: bool = False) -> Equation:
    """
    Разбирает уравнение или выражение в инфиксной записи.

    Args:
        src: Текст вида "u_t + 0.955*cos(u)*u_x = 0" или "x - 1 + 1 + y"
        implicit_mul: Разрешить умножение без '*' (сокращённая запись из статей)

    Returns:
        Equation с residual = LHS - RHS (или LHS, если RHS равен нулю)
    """
    src = normalize_shorthand(src)
    tokens = _tokenize(src)
    if not tokens:
        raise InfixSyntaxError("Пустое выражение", 0)
    if implicit_mul:
        tokens = _insert_implicit_products(tokens)

    parser = _Parser(tokens, src)
    lhs = parser.expression()
    residual = lhs
    if parser.at_op("="):
        parser.advance()
        rhs = parser.expression()
        residual = lhs if _is_zero_literal(rhs) else Binary("sub", lhs, rhs)
    extra = parser.peek()
    if extra is not None:
        raise InfixSyntaxError(f"Лишний символ '{extra.text}'", extra.offset)
    logger.debug(f"Разобрано уравнение: {src!r}")
    return Equation(residual)
