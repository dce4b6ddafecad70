# /symbolic/evaluate.py
"""Численное вычисление невязки уравнения на массивах numpy."""
from typing import Mapping, Union

import numpy as np

from core.errors import UnsupportedNode
from symbolic.canon import expand_derivatives
from symbolic.expr import Const, Deriv, Equation, Expr, Field, Int, Placeholder, Unary, Var

ArrayLike = Union[np.ndarray, float]


def derivative_key(var: str, order: int) -> str:
    """Имя производной в окружении: ('x', 2) -> 'u_xx'."""
    return "u_" + var * order


def evaluate(e: Union[Expr, Equation], env: Mapping[str, ArrayLike]) -> np.ndarray:
    """
    Вычисляет выражение поточечно.

    Args:
        e: Выражение или уравнение (берётся невязка)
        env: Значения "u", производных "u_x", "u_xx", "u_t", ... и переменных "x", "t"

    Returns:
        Массив значений (форма определяется env)
    """
    if isinstance(e, Equation):
        e = e.residual
    return np.asarray(_eval(expand_derivatives(e), env), dtype=float)


def _lookup(env: Mapping[str, ArrayLike], name: str) -> ArrayLike:
    if name not in env:
        raise UnsupportedNode(f"Нет значения для '{name}'")
    return env[name]


def _eval(e: Expr, env: Mapping[str, ArrayLike]) -> ArrayLike:
    if isinstance(e, (Const, Int)):
        return float(e.value)
    if isinstance(e, Placeholder):
        raise UnsupportedNode("Невозможно вычислить замаскированный коэффициент [?]")
    if isinstance(e, Var):
        return _lookup(env, e.name)
    if isinstance(e, Field):
        return _lookup(env, "u")
    if isinstance(e, Deriv):
        # после expand_derivatives производные стоят только над u
        return _lookup(env, derivative_key(e.var, e.order))
    if isinstance(e, Unary):
        value = _eval(e.child, env)
        if e.fn == "sin":
            return np.sin(value)
        if e.fn == "cos":
            return np.cos(value)
        return -value
    left = _eval(e.left, env)
    if e.op == "pow":
        if not isinstance(e.right, Int):
            raise UnsupportedNode("Показатель степени должен быть целым")
        return np.power(np.asarray(left, dtype=float), e.right.value)
    right = _eval(e.right, env)
    if e.op == "add":
        return left + right
    if e.op == "sub":
        return left - right
    if e.op == "mul":
        return left * right
    return np.divide(left, right)
