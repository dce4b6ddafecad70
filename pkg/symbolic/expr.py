# /symbolic/expr.py
"""
Деревья выражений для эволюционных УЧП.

Все узлы неизменяемы (frozen dataclass), поэтому деревья можно свободно
разделять между потоками и использовать как ключи словарей.
"""
import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple, Union

from core.errors import UnsupportedNode

UNARY_FUNCTIONS = ("sin", "cos", "neg")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
DERIV_VARS = ("x", "t")


@dataclass(frozen=True)
class Const:
    """Вещественная константа (коэффициент)"""
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"Константа должна быть конечной: {self.value}")


@dataclass(frozen=True)
class Int:
    """Целая константа (в том числе показатель степени)"""
    value: int


@dataclass(frozen=True)
class Var:
    """Переменная: x, t или обобщённая x_1, x_2, ..."""
    name: str


@dataclass(frozen=True)
class Field:
    """Неизвестное поле u(x,t)"""


@dataclass(frozen=True)
class Placeholder:
    """Замаскированный коэффициент [?]"""


@dataclass(frozen=True)
class Unary:
    fn: str
    child: "Expr"

    def __post_init__(self):
        if self.fn not in UNARY_FUNCTIONS:
            raise ValueError(f"Неизвестная функция: {self.fn}")


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"Неизвестная операция: {self.op}")


@dataclass(frozen=True)
class Deriv:
    """Частная производная child по var порядка order"""
    child: "Expr"
    var: str
    order: int = 1

    def __post_init__(self):
        if self.var not in DERIV_VARS:
            raise ValueError(f"Производная допускается только по x или t, получено: {self.var}")
        if self.order < 1:
            raise ValueError(f"Порядок производной должен быть >= 1, получено: {self.order}")


Expr = Union[Const, Int, Var, Field, Placeholder, Unary, Binary, Deriv]
Number = Union[Const, Int]

FIELD = Field()
PLACEHOLDER = Placeholder()


@dataclass(frozen=True)
class Equation:
    """Уравнение в форме residual = 0"""
    residual: Expr


# --- Конструкторы-сокращения ---

def add(a: Expr, b: Expr) -> Binary:
    return Binary("add", a, b)


def sub(a: Expr, b: Expr) -> Binary:
    return Binary("sub", a, b)


def mul(a: Expr, b: Expr) -> Binary:
    return Binary("mul", a, b)


def div(a: Expr, b: Expr) -> Binary:
    return Binary("div", a, b)


def power(base: Expr, exponent: int) -> Binary:
    return Binary("pow", base, Int(exponent))


def d(var: str, order: int = 1, child: Expr = FIELD) -> Deriv:
    return Deriv(child, var, order)


def number(value: Union[int, float]) -> Number:
    """Int для целых значений, Const для остальных."""
    if isinstance(value, int):
        return Int(value)
    return Const(float(value))


def is_number(e: Expr) -> bool:
    return isinstance(e, (Const, Int))


def fold(op: str, items: Iterable[Expr]) -> Expr:
    """Собирает список в левоассоциативное бинарное дерево."""
    items = list(items)
    if not items:
        raise ValueError("Пустой список операндов")
    result = items[0]
    for item in items[1:]:
        result = Binary(op, result, item)
    return result


def flatten(e: Expr, op: str) -> List[Expr]:
    """Разворачивает цепочку одинаковых бинарных операций в список операндов."""
    if isinstance(e, Binary) and e.op == op:
        return flatten(e.left, op) + flatten(e.right, op)
    return [e]


def walk(e: Expr) -> Iterable[Expr]:
    """Обход дерева в прямом порядке."""
    yield e
    if isinstance(e, Unary):
        yield from walk(e.child)
    elif isinstance(e, Binary):
        yield from walk(e.left)
        yield from walk(e.right)
    elif isinstance(e, Deriv):
        yield from walk(e.child)


def count_nodes(e: Expr) -> int:
    return sum(1 for _ in walk(e))


# --- Инфиксная запись ---

_PRECEDENCE = {"add": 1, "sub": 1, "mul": 2, "div": 2, "pow": 3}
_SYMBOLS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def format_number(e: Number) -> str:
    if isinstance(e, Int):
        return str(e.value)
    text = repr(e.value)
    if not any(c in text for c in ".e"):
        text += ".0"
    return text


def _deriv_shorthand(e: Deriv) -> str:
    return "u_" + e.var * e.order


def to_infix(e: Expr) -> str:
    """
    Печатает дерево в грамматике parse_infix.

    Скобки ставятся так, чтобы разбор вернул то же самое дерево.
    """
    return _infix(e, 0)


def _infix(e: Expr, parent_prec: int) -> str:
    if isinstance(e, Int):
        text = str(e.value)
        return f"({text})" if e.value < 0 and parent_prec > 0 else text
    if isinstance(e, Const):
        text = format_number(e)
        return f"({text})" if e.value < 0 and parent_prec > 0 else text
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Field):
        return "u"
    if isinstance(e, Placeholder):
        return "[?]"
    if isinstance(e, Unary):
        if e.fn == "neg":
            inner = _infix(e.child, 3)
            if is_number(e.child) and e.child.value >= 0:
                inner = f"({inner})"
            text = "-" + inner
            return f"({text})" if parent_prec > 0 else text
        return f"{e.fn}({_infix(e.child, 0)})"
    if isinstance(e, Deriv):
        if isinstance(e.child, Field) and (e.var == "t" and e.order == 1 or e.var == "x" and e.order <= 3):
            return _deriv_shorthand(e)
        if e.order != 1:
            raise UnsupportedNode(f"Производная порядка {e.order} от выражения не имеет инфиксной записи")
        return f"({_infix(e.child, 0)})_{e.var}"
    prec = _PRECEDENCE[e.op]
    if e.op == "pow":
        text = f"{_infix(e.left, 4)}^{_infix(e.right, 0)}"
    elif e.op == "mul":
        # цепочки умножения разбираются справа налево
        left = _infix(e.left, prec)
        if isinstance(e.left, Binary) and e.left.op == "mul":
            left = f"({left})"
        right = _infix(e.right, prec)
        if isinstance(e.right, Binary) and e.right.op == "div":
            right = f"({right})"
        text = f"{left} * {right}"
    else:
        # левая ассоциативность: правый операнд того же приоритета берём в скобки
        left = _infix(e.left, prec)
        right = _infix(e.right, prec + 1)
        text = f"{left} {_SYMBOLS[e.op]} {right}"
    return f"({text})" if prec < parent_prec else text


def equation_to_infix(eq: Equation) -> str:
    return f"{to_infix(eq.residual)} = 0"


# --- Сериализация в JSON-совместимую структуру ---

def to_dict(e: Expr) -> dict:
    """Дерево как вложенный словарь (для вывода CLI)."""
    if isinstance(e, Const):
        return {"kind": "const", "value": e.value}
    if isinstance(e, Int):
        return {"kind": "int", "value": e.value}
    if isinstance(e, Var):
        return {"kind": "var", "name": e.name}
    if isinstance(e, Field):
        return {"kind": "field"}
    if isinstance(e, Placeholder):
        return {"kind": "placeholder"}
    if isinstance(e, Unary):
        return {"kind": e.fn, "child": to_dict(e.child)}
    if isinstance(e, Binary):
        return {"kind": e.op, "left": to_dict(e.left), "right": to_dict(e.right)}
    return {"kind": "deriv", "var": e.var, "order": e.order, "child": to_dict(e.child)}


def leaf_constants(e: Expr) -> Tuple[Const, ...]:
    return tuple(node for node in walk(e) if isinstance(node, Const))
