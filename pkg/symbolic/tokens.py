# /symbolic/tokens.py
"""
Токенизация уравнений для символьной модели.

Два диалекта:
    manual    - префиксный обход дерева как оно записано, производные
                от u в сокращённой форме (u_x, u_xx, ...)
    canonical - n-арная сумма мономов «× коэффициент множители...»
                по канонической форме, производные в виде ∂ ( u(x,t) , x )
"""
import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple, Union

from core.errors import DecodeError, UnsupportedNode
from symbolic.canon import canonicalize, split_terms
from symbolic.expr import (
    FIELD, PLACEHOLDER, Binary, Const, Deriv, Equation, Expr, Field, Int,
    Placeholder, Unary, Var, fold, is_number, mul,
)

logger = logging.getLogger("symfilter_symbolic")

# --- Словарь ---
ADD = "+"
SUB = "−"
MUL = "×"
DIV = "÷"
POW = "pow"
DERIV = "∂"
LPAREN = "("
RPAREN = ")"
COMMA = ","
FIELD_TOKEN = "u(x,t)"
MANUAL_FIELD_TOKEN = "u"
PLACEHOLDER_TOKEN = "[?]"

OP_TOKENS = {"add": ADD, "sub": SUB, "mul": MUL, "div": DIV, "pow": POW}
_TOKEN_OPS = {token: op for op, token in OP_TOKENS.items()}
FUNCTION_TOKENS = ("sin", "cos", "neg")
SHORTHAND_TOKENS = {
    "u_t": ("t", 1),
    "u_x": ("x", 1),
    "u_xx": ("x", 2),
    "u_xxx": ("x", 3),
}
_SHORTHAND_BY_DERIV = {value: key for key, value in SHORTHAND_TOKENS.items()}
_STRUCTURAL = (DERIV, LPAREN, RPAREN, COMMA)

_INT_RE = re.compile(r"^-?\d+$")
_FLOAT_RE = re.compile(r"^-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?$")
_VAR_RE = re.compile(r"^[A-Za-z](?:_\d+)?$")


class Dialect(str, Enum):
    MANUAL = "manual"
    CANONICAL = "canonical"


@dataclass(frozen=True)
class TokenSeq:
    dialect: Dialect
    tokens: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def text(self) -> str:
        return " ".join(self.tokens)

    def bracketed(self) -> str:
        """Запись вида [+ × 1 u(x,t) ...], как на рисунках."""
        return f"[{self.text()}]"


def format_float(value: float, dialect: Dialect) -> str:
    """
    Текст вещественной константы.

    В каноническом диалекте всегда 3 значащие цифры (0.500, 1.00e-05),
    в ручном - короткая запись с обязательной точкой (1.5, 2.0).
    """
    if dialect == Dialect.CANONICAL:
        return f"{value:#.3g}"
    text = f"{value:.3g}"
    if not any(c in text for c in ".e"):
        text += ".0"
    return text


def _residual(eq: Union[Equation, Expr]) -> Expr:
    return eq.residual if isinstance(eq, Equation) else eq


def _leaf_token(e: Expr, dialect: Dialect) -> str:
    if isinstance(e, Int):
        return str(e.value)
    if isinstance(e, Const):
        return format_float(e.value, dialect)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Placeholder):
        return PLACEHOLDER_TOKEN
    if isinstance(e, Field):
        return MANUAL_FIELD_TOKEN if dialect == Dialect.MANUAL else FIELD_TOKEN
    raise UnsupportedNode(f"Узел {type(e).__name__} не является листом")


# --- Ручной диалект ---

def _manual(e: Expr, out: List[str]) -> None:
    if isinstance(e, Unary):
        out.append(e.fn)
        _manual(e.child, out)
    elif isinstance(e, Binary):
        out.append(OP_TOKENS[e.op])
        _manual(e.left, out)
        _manual(e.right, out)
    elif isinstance(e, Deriv):
        shorthand = _SHORTHAND_BY_DERIV.get((e.var, e.order))
        if not isinstance(e.child, Field) or shorthand is None:
            raise UnsupportedNode(
                f"Производная порядка {e.order} по {e.var} от составного выражения "
                f"не представима в ручном диалекте"
            )
        out.append(shorthand)
    else:
        out.append(_leaf_token(e, Dialect.MANUAL))


def to_manual_tokens(eq: Union[Equation, Expr]) -> TokenSeq:
    """Префиксный обход дерева без канонизации."""
    out: List[str] = []
    _manual(_residual(eq), out)
    return TokenSeq(Dialect.MANUAL, tuple(out))


# --- Канонический диалект ---

def _canonical_expr(e: Expr, out: List[str]) -> None:
    if isinstance(e, Unary):
        out.append(e.fn)
        _canonical_expr(e.child, out)
    elif isinstance(e, Binary):
        out.append(OP_TOKENS[e.op])
        _canonical_expr(e.left, out)
        _canonical_expr(e.right, out)
    elif isinstance(e, Deriv):
        if not isinstance(e.child, Field):
            raise UnsupportedNode("В канонической форме производные стоят только над u")
        out.extend([DERIV, LPAREN, FIELD_TOKEN, COMMA])
        if e.order == 1:
            out.append(e.var)
        else:
            out.extend([LPAREN, e.var, COMMA, str(e.order), RPAREN])
        out.append(RPAREN)
    else:
        out.append(_leaf_token(e, Dialect.CANONICAL))


def to_canonical_tokens(eq: Union[Equation, Expr]) -> TokenSeq:
    """
    Токены канонической формы.

    Корневой '+' n-арный и охватывает всю последовательность; каждое
    слагаемое начинается с '×' и коэффициента (числа или [?]).
    """
    terms = split_terms(canonicalize(_residual(eq)))
    out: List[str] = []
    if len(terms) > 1:
        out.append(ADD)
    for coef, factors in terms:
        out.append(MUL)
        out.append(_leaf_token(coef, Dialect.CANONICAL))
        for factor in factors:
            _canonical_expr(factor, out)
    return TokenSeq(Dialect.CANONICAL, tuple(out))


def encode(eq: Union[Equation, Expr], dialect: Union[Dialect, str]) -> TokenSeq:
    dialect = Dialect(dialect)
    if dialect == Dialect.MANUAL:
        return to_manual_tokens(eq)
    return to_canonical_tokens(eq)


# --- Декодирование ---

def _number_leaf(token: str) -> Expr:
    if _INT_RE.match(token):
        return Int(int(token))
    value = float(token)
    if not math.isfinite(value):
        raise DecodeError(f"Токен '{token}' не является конечным числом")
    return Const(value)


def _is_number_token(token: str) -> bool:
    return bool(_INT_RE.match(token) or _FLOAT_RE.match(token))


class _Decoder:
    def __init__(self, tokens: Tuple[str, ...], dialect: Dialect):
        self.tokens = tokens
        self.dialect = dialect
        self.pos = 0

    def peek(self) -> str:
        if self.pos >= len(self.tokens):
            raise DecodeError("Последовательность токенов обрывается")
        return self.tokens[self.pos]

    def advance(self) -> str:
        token = self.peek()
        self.pos += 1
        return token

    def expect(self, token: str) -> None:
        actual = self.advance()
        if actual != token:
            raise DecodeError(f"Ожидался токен '{token}', получен '{actual}' (позиция {self.pos - 1})")

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def leaf(self, token: str) -> Expr:
        if _is_number_token(token):
            return _number_leaf(token)
        if token == PLACEHOLDER_TOKEN:
            return PLACEHOLDER
        if token in (FIELD_TOKEN, MANUAL_FIELD_TOKEN):
            return FIELD
        if token in SHORTHAND_TOKENS:
            var, order = SHORTHAND_TOKENS[token]
            return Deriv(FIELD, var, order)
        if _VAR_RE.match(token) and token != MANUAL_FIELD_TOKEN:
            return Var(token)
        raise DecodeError(f"Токен '{token}' вне словаря (позиция {self.pos - 1})")

    def prefix(self) -> Expr:
        """Бинарный префиксный разбор одного поддерева."""
        token = self.advance()
        if token in _TOKEN_OPS:
            left = self.prefix()
            right = self.prefix()
            return Binary(_TOKEN_OPS[token], left, right)
        if token in FUNCTION_TOKENS:
            return Unary(token, self.prefix())
        if token == DERIV:
            if self.dialect == Dialect.MANUAL:
                raise DecodeError("Токен '∂' недопустим в ручном диалекте")
            return self.derivative()
        if token in _STRUCTURAL:
            raise DecodeError(f"Неожиданный токен '{token}' (позиция {self.pos - 1})")
        return self.leaf(token)

    def derivative(self) -> Expr:
        # ∂ ( u(x,t) , x )  или  ∂ ( u(x,t) , ( x , n ) )
        self.expect(LPAREN)
        self.expect(FIELD_TOKEN)
        self.expect(COMMA)
        token = self.advance()
        if token == LPAREN:
            var = self.advance()
            self.expect(COMMA)
            order_token = self.advance()
            if not _INT_RE.match(order_token) or int(order_token) < 1:
                raise DecodeError(f"Неверный порядок производной '{order_token}'")
            order = int(order_token)
            self.expect(RPAREN)
        else:
            var, order = token, 1
        if var not in ("x", "t"):
            raise DecodeError(f"Производная по неизвестной переменной '{var}'")
        self.expect(RPAREN)
        return Deriv(FIELD, var, order)

    def coefficient(self) -> Expr:
        token = self.advance()
        if token == PLACEHOLDER_TOKEN:
            return PLACEHOLDER
        if _is_number_token(token):
            return _number_leaf(token)
        raise DecodeError(f"Ожидался коэффициент, получен '{token}' (позиция {self.pos - 1})")

    def term(self) -> Expr:
        self.expect(MUL)
        coef = self.coefficient()
        factors = []
        while not self.at_end() and self.tokens[self.pos] != MUL:
            factors.append(self.prefix())
        if not factors:
            return coef
        product = fold("mul", factors)
        if is_number(coef) and coef.value == 1:
            return product
        return mul(coef, product)

    def canonical(self) -> Expr:
        first = self.peek()
        if first == ADD:
            self.advance()
            terms = []
            while not self.at_end():
                if self.tokens[self.pos] != MUL:
                    raise DecodeError(f"Слагаемое должно начинаться с '×' (позиция {self.pos})")
                terms.append(self.term())
            if len(terms) < 2:
                raise DecodeError("Корневая сумма должна содержать не меньше двух слагаемых")
            return fold("add", terms)
        if first == MUL:
            return self.term()
        return self.prefix()


def from_tokens(seq: TokenSeq) -> Equation:
    """
    Восстанавливает уравнение по токенам.

    Raises:
        DecodeError: токен вне словаря, обрыв или лишние токены
    """
    if not seq.tokens:
        raise DecodeError("Пустая последовательность токенов")
    decoder = _Decoder(tuple(seq.tokens), Dialect(seq.dialect))
    if decoder.dialect == Dialect.CANONICAL:
        residual = decoder.canonical()
    else:
        residual = decoder.prefix()
    if not decoder.at_end():
        raise DecodeError(f"Лишние токены начиная с позиции {decoder.pos}")
    return Equation(residual)


def parse_token_text(text: str, dialect: Union[Dialect, str]) -> TokenSeq:
    """Разбирает строку токенов через пробел; внешние квадратные скобки допускаются."""
    tokens = text.split()
    if tokens and tokens[0].startswith("[") and tokens[0] != PLACEHOLDER_TOKEN:
        tokens[0] = tokens[0][1:]
        if not tokens[-1].endswith("]"):
            raise DecodeError("Незакрытая квадратная скобка")
        tokens[-1] = tokens[-1][:-1]
        tokens = [t for t in tokens if t]
    return TokenSeq(Dialect(dialect), tuple(tokens))
