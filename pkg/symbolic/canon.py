# /symbolic/canon.py
"""
Каноническая форма уравнений.

Любое выражение приводится к сумме мономов «коэффициент × произведение
множителей». Константы сворачиваются точно (fractions.Fraction), подобные
множители и слагаемые объединяются, нулевые слагаемые отбрасываются,
а порядок задаётся ключом canonical_key. Две алгебраически одинаковые
записи дают одно и то же дерево.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from core.errors import DivisionByZero, UnsupportedNode
from symbolic.expr import (
    FIELD, PLACEHOLDER, Binary, Const, Deriv, Equation, Expr, Field, Int,
    Placeholder, Unary, Var, flatten, fold, is_number, mul,
)

logger = logging.getLogger("symfilter_symbolic")

Coefficient = Union[Fraction, Placeholder]
CanonicalKey = Tuple

_FN_RANK = {"sin": 0, "cos": 1, "neg": 2}
_OP_RANK = {"add": 0, "sub": 1, "mul": 2, "div": 3, "pow": 4}
_VAR_RANK = {"t": 0, "x": 1}
_CONSTANT_TERM_KEY = ((8,),)


def canonical_key(e: Expr) -> CanonicalKey:
    """
    Ключ сортировки множителей.

    Порядок: u < переменные < функции < степени < прочие операции
    < производные (сначала по t, затем по x, по возрастанию порядка)
    < [?] < числа.
    """
    if isinstance(e, Field):
        return (0,)
    if isinstance(e, Var):
        return (1, e.name)
    if isinstance(e, Unary):
        return (2, _FN_RANK[e.fn], canonical_key(e.child))
    if isinstance(e, Binary):
        if e.op == "pow":
            return (3, canonical_key(e.left), canonical_key(e.right))
        return (4, _OP_RANK[e.op], canonical_key(e.left), canonical_key(e.right))
    if isinstance(e, Deriv):
        return (5, _VAR_RANK[e.var], e.order, canonical_key(e.child))
    if isinstance(e, Placeholder):
        return (6,)
    if isinstance(e, Int):
        return (7, float(e.value), 0)
    return (7, e.value, 1)


# --- Раскрытие производных ---

def _diff(e: Expr, var: str) -> Expr:
    """Первая производная по var от дерева без производных составных выражений."""
    if isinstance(e, (Const, Int, Placeholder)):
        return Int(0)
    if isinstance(e, Var):
        return Int(1) if e.name == var else Int(0)
    if isinstance(e, Field):
        return Deriv(FIELD, var, 1)
    if isinstance(e, Deriv):
        if e.var != var:
            raise UnsupportedNode(f"Смешанные производные (по {e.var} и {var}) не поддерживаются")
        return Deriv(e.child, var, e.order + 1)
    if isinstance(e, Unary):
        inner = _diff(e.child, var)
        if e.fn == "neg":
            return Unary("neg", inner)
        if e.fn == "sin":
            return mul(Unary("cos", e.child), inner)
        return mul(Int(-1), mul(Unary("sin", e.child), inner))
    da = _diff(e.left, var)
    if e.op == "pow":
        if not isinstance(e.right, Int):
            raise UnsupportedNode("Производная степени с нецелым показателем не поддерживается")
        n = e.right.value
        return mul(Int(n), mul(Binary("pow", e.left, Int(n - 1)), da))
    db = _diff(e.right, var)
    if e.op in ("add", "sub"):
        return Binary(e.op, da, db)
    if e.op == "mul":
        return Binary("add", mul(da, e.right), mul(e.left, db))
    # div
    numerator = Binary("sub", mul(da, e.right), mul(e.left, db))
    return Binary("div", numerator, Binary("pow", e.right, Int(2)))


def expand_derivatives(e: Expr) -> Expr:
    """
    Раскрывает производные составных выражений по правилам дифференцирования.

    После раскрытия производные стоят только над u: (u^2)_x -> 2*u^1*u_x.
    Повторные производные по одной переменной складывают порядки.
    """
    if isinstance(e, Unary):
        return Unary(e.fn, expand_derivatives(e.child))
    if isinstance(e, Binary):
        return Binary(e.op, expand_derivatives(e.left), expand_derivatives(e.right))
    if isinstance(e, Deriv):
        inner = expand_derivatives(e.child)
        if isinstance(inner, Field):
            return Deriv(FIELD, e.var, e.order)
        for _ in range(e.order):
            inner = _diff(inner, e.var)
        return inner
    return e


# --- Мономы ---

@dataclass
class _Term:
    coef: Coefficient
    factors: Dict[Expr, int]

    def signature(self) -> frozenset:
        return frozenset(self.factors.items())


def _mul_coef(a: Coefficient, b: Coefficient) -> Coefficient:
    if isinstance(a, Placeholder) or isinstance(b, Placeholder):
        return PLACEHOLDER
    return a * b


def _add_coef(a: Coefficient, b: Coefficient) -> Coefficient:
    if isinstance(a, Placeholder) or isinstance(b, Placeholder):
        return PLACEHOLDER
    return a + b


def _is_zero(c: Coefficient) -> bool:
    return isinstance(c, Fraction) and c == 0


def _collect(terms: List[_Term]) -> List[_Term]:
    """Объединяет подобные слагаемые и удаляет нулевые."""
    merged: Dict[frozenset, _Term] = {}
    for term in terms:
        key = term.signature()
        if key in merged:
            merged[key] = _Term(_add_coef(merged[key].coef, term.coef), dict(term.factors))
        else:
            merged[key] = _Term(term.coef, dict(term.factors))
    return [t for t in merged.values() if not _is_zero(t.coef)]


def _scale(terms: List[_Term], c: Coefficient) -> List[_Term]:
    if _is_zero(c):
        return []
    return _collect([_Term(_mul_coef(t.coef, c), dict(t.factors)) for t in terms])


def _as_scalar(terms: List[_Term]) -> Optional[Coefficient]:
    """Значение суммы, если в ней нет множителей, иначе None."""
    if not terms:
        return Fraction(0)
    if len(terms) == 1 and not terms[0].factors:
        return terms[0].coef
    return None


def _mul_terms(a: _Term, b: _Term) -> _Term:
    factors = dict(a.factors)
    for base, exp in b.factors.items():
        total = factors.get(base, 0) + exp
        if total == 0:
            factors.pop(base, None)
        else:
            factors[base] = total
    return _Term(_mul_coef(a.coef, b.coef), factors)


def _as_single(terms: List[_Term]) -> _Term:
    """Сумма из нескольких слагаемых становится непрозрачным множителем."""
    if len(terms) == 1:
        return terms[0]
    return _Term(Fraction(1), {_build(terms): 1})


def _product(a: List[_Term], b: List[_Term]) -> List[_Term]:
    sa, sb = _as_scalar(a), _as_scalar(b)
    if sa is not None:
        return _scale(b, sa)
    if sb is not None:
        return _scale(a, sb)
    return _collect([_mul_terms(_as_single(a), _as_single(b))])


def _power(terms: List[_Term], n: int) -> List[_Term]:
    if n == 0:
        return [_Term(Fraction(1), {})]
    scalar = _as_scalar(terms)
    if isinstance(scalar, Placeholder):
        return [_Term(PLACEHOLDER, {})]
    if scalar is not None:
        if scalar == 0:
            if n < 0:
                raise DivisionByZero("Ноль в отрицательной степени")
            return []
        return [_Term(scalar ** n, {})]
    if len(terms) == 1:
        term = terms[0]
        coef = term.coef if isinstance(term.coef, Placeholder) else term.coef ** n
        return [_Term(coef, {base: exp * n for base, exp in term.factors.items()})]
    if n == 1:
        return terms
    return [_Term(Fraction(1), {_build(terms): n})]


def _terms(e: Expr) -> List[_Term]:
    if isinstance(e, (Const, Int)):
        if e.value == 0:
            return []
        return [_Term(Fraction(e.value), {})]
    if isinstance(e, Placeholder):
        return [_Term(PLACEHOLDER, {})]
    if isinstance(e, (Field, Var)):
        return [_Term(Fraction(1), {e: 1})]
    if isinstance(e, Deriv):
        if not isinstance(e.child, Field):
            raise UnsupportedNode("Производная составного выражения должна быть раскрыта заранее")
        return [_Term(Fraction(1), {e: 1})]
    if isinstance(e, Unary):
        inner = _terms(e.child)
        if e.fn == "neg":
            return _scale(inner, Fraction(-1))
        scalar = _as_scalar(inner)
        if isinstance(scalar, Fraction):
            value = math.sin(float(scalar)) if e.fn == "sin" else math.cos(float(scalar))
            return _terms(Const(value))
        return [_Term(Fraction(1), {Unary(e.fn, _build(inner)): 1})]

    left = _terms(e.left)
    if e.op == "pow":
        exponent = _as_scalar(_terms(e.right))
        if not isinstance(exponent, Fraction) or exponent.denominator != 1:
            raise UnsupportedNode("Показатель степени должен быть целым числом")
        return _power(left, int(exponent))
    right = _terms(e.right)
    if e.op == "add":
        return _collect(left + right)
    if e.op == "sub":
        return _collect(left + _scale(right, Fraction(-1)))
    if e.op == "mul":
        return _product(left, right)
    # div
    divisor = _as_scalar(right)
    if isinstance(divisor, Fraction):
        if divisor == 0:
            raise DivisionByZero("Деление на ноль")
        return _scale(left, 1 / divisor)
    if isinstance(divisor, Placeholder):
        return _scale(left, PLACEHOLDER)
    return _product(left, _power(right, -1))


# --- Сборка дерева ---

def _coef_leaf(c: Coefficient) -> Expr:
    if isinstance(c, Placeholder):
        return PLACEHOLDER
    if c.denominator == 1:
        return Int(int(c))
    return Const(float(c))


def _factor_expr(base: Expr, exp: int) -> Expr:
    return base if exp == 1 else Binary("pow", base, Int(exp))


def _sorted_factors(term: _Term) -> List[Expr]:
    return sorted((_factor_expr(b, n) for b, n in term.factors.items()), key=canonical_key)


def _term_key(term: _Term) -> CanonicalKey:
    factors = _sorted_factors(term)
    if not factors:
        return _CONSTANT_TERM_KEY
    return tuple(canonical_key(f) for f in factors)


def _term_expr(term: _Term) -> Expr:
    factors = _sorted_factors(term)
    leaf = _coef_leaf(term.coef)
    if not factors:
        return leaf
    product = fold("mul", factors)
    if isinstance(term.coef, Fraction) and term.coef == 1:
        return product
    return mul(leaf, product)


def _build(terms: List[_Term]) -> Expr:
    if not terms:
        return Int(0)
    ordered = sorted(terms, key=_term_key)
    return fold("add", [_term_expr(t) for t in ordered])


def _residual(e: Union[Expr, Equation]) -> Expr:
    return e.residual if isinstance(e, Equation) else e


def canonicalize(e: Union[Expr, Equation]) -> Expr:
    """
    Приводит выражение (или невязку уравнения) к канонической форме.

    Raises:
        UnsupportedNode: смешанные производные или нецелый показатель
        DivisionByZero: деление на нулевую константу
    """
    return _build(_terms(expand_derivatives(_residual(e))))


def canonicalize_equation(eq: Equation) -> Equation:
    return Equation(canonicalize(eq))


def equivalent(a: Union[Expr, Equation], b: Union[Expr, Equation]) -> bool:
    """Совпадают ли канонические формы."""
    return canonicalize(a) == canonicalize(b)


def split_terms(canonical: Expr) -> List[Tuple[Expr, Tuple[Expr, ...]]]:
    """
    Раскладывает каноническое дерево на пары (коэффициент, множители).

    Коэффициент: Int, Const или Placeholder; у слагаемого без явного
    коэффициента он равен Int(1).
    """
    result = []
    for term in flatten(canonical, "add"):
        if is_number(term) or isinstance(term, Placeholder):
            result.append((term, ()))
        elif isinstance(term, Binary) and term.op == "mul" and (
                is_number(term.left) or isinstance(term.left, Placeholder)):
            result.append((term.left, tuple(flatten(term.right, "mul"))))
        else:
            result.append((Int(1), tuple(flatten(term, "mul"))))
    return result


def canonical_terms(e: Union[Expr, Equation]) -> List[Tuple[Expr, Tuple[Expr, ...]]]:
    """Слагаемые канонической формы выражения."""
    return split_terms(canonicalize(e))
