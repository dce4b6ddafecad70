# /symbolic/perturb.py
"""
Возмущения символьных записей уравнений.

- перестановка ветвей сложения и умножения (вычитание с вероятностью
  переписывается через сложение с множителем -1);
- добавление ошибочного слагаемого c·T из библиотеки;
- маскирование коэффициентов заглушкой [?].

Все операции детерминированы при заданном seed.
"""
import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy as np

from core.errors import ConfigError, ExprError
from core.settings_manager import DEFAULT_SETTINGS, get_setting
from symbolic.expr import (
    PLACEHOLDER, Binary, Const, Deriv, Equation, Expr, Int, Placeholder, Unary,
    add, flatten, is_number, mul, to_infix,
)
from symbolic.parser import parse_expr
from symbolic.tokens import TokenSeq, to_canonical_tokens, to_manual_tokens

logger = logging.getLogger("symfilter_symbolic")

SETTINGS = ("manual", "swapping", "noisy_swapping", "canonical", "noisy_canonical")


def _default_noise_library() -> Tuple[Expr, ...]:
    return tuple(parse_expr(src) for src in DEFAULT_SETTINGS["perturb"]["noise_terms"])


@dataclass
class PerturbConfig:
    """Параметры возмущений"""
    swap_prob: float = 0.5
    noise_prob: float = 0.5
    noise_term_library: Tuple[Expr, ...] = field(default_factory=_default_noise_library)
    noise_coeff_range: Tuple[float, float] = (0.1, 1.0)
    seed: int = 0
    # Перестановка всех операндов n-арной цепочки вместо попарных обменов
    permute_nary: bool = False

    def __post_init__(self):
        for name in ("swap_prob", "noise_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} должна лежать в [0, 1], получено {value}")
        lo, hi = self.noise_coeff_range
        if not lo <= hi:
            raise ConfigError(f"Пустой интервал коэффициентов шума: [{lo}, {hi}]")
        self.noise_term_library = tuple(self.noise_term_library)
        if not self.noise_term_library:
            raise ConfigError("Библиотека ошибочных слагаемых пуста")

    @classmethod
    def from_settings(cls, **overrides) -> "PerturbConfig":
        """Собирает конфигурацию из файла настроек (раздел perturb)."""
        section = get_setting("perturb") or DEFAULT_SETTINGS["perturb"]
        params = {
            "swap_prob": section.get("swap_prob", 0.5),
            "noise_prob": section.get("noise_prob", 0.5),
            "noise_term_library": tuple(parse_expr(src) for src in section.get("noise_terms", [])),
            "noise_coeff_range": tuple(section.get("noise_coeff_range", (0.1, 1.0))),
        }
        params.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**params)


@dataclass(frozen=True)
class NoiseProvenance:
    """Что именно добавила inject_noise_term"""
    injected: bool
    term: Optional[Expr] = None
    coefficient: Optional[float] = None

    def to_json(self) -> Optional[dict]:
        if not self.injected:
            return None
        return {"term": to_infix(self.term), "coefficient": self.coefficient}


def derive_seed(root_seed: int, index: int) -> int:
    """Независимый seed для index-го уравнения при параллельной обработке."""
    return int(np.random.SeedSequence([root_seed, index]).generate_state(1, dtype=np.uint64)[0])


def _rng(cfg: PerturbConfig, rng: Optional[np.random.Generator]) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(cfg.seed)


def _refill(node: Expr, op: str, operands: Iterator[Expr]) -> Expr:
    """Раскладывает операнды обратно по исходному скелету цепочки op."""
    if isinstance(node, Binary) and node.op == op:
        left = _refill(node.left, op, operands)
        right = _refill(node.right, op, operands)
        return Binary(op, left, right)
    return next(operands)


def swap_branches(e: Expr, cfg: PerturbConfig, rng: Optional[np.random.Generator] = None) -> Expr:
    """
    Случайно меняет порядок операндов сложения и умножения.

    Каждый узел add/mul меняет операнды местами с вероятностью swap_prob;
    узел sub(a, b) с той же вероятностью становится add(mul(-1, b), a).
    Результат математически эквивалентен входу.

    Args:
        e: Исходное дерево
        cfg: Параметры (swap_prob, seed, permute_nary)
        rng: Внешний генератор; если не задан, создаётся из cfg.seed

    Returns:
        Новое дерево
    """
    rng = _rng(cfg, rng)
    p = cfg.swap_prob

    def visit(node: Expr) -> Expr:
        if isinstance(node, Unary):
            return Unary(node.fn, visit(node.child))
        if isinstance(node, Deriv):
            return Deriv(visit(node.child), node.var, node.order)
        if not isinstance(node, Binary):
            return node
        if node.op in ("add", "mul") and cfg.permute_nary:
            operands = flatten(node, node.op)
            if len(operands) > 2:
                visited = [visit(o) for o in operands]
                if rng.random() < p:
                    order = rng.permutation(len(visited))
                    visited = [visited[i] for i in order]
                return _refill(node, node.op, iter(visited))
        left, right = visit(node.left), visit(node.right)
        if node.op in ("add", "mul"):
            if rng.random() < p:
                return Binary(node.op, right, left)
            return Binary(node.op, left, right)
        if node.op == "sub":
            if rng.random() < p:
                return add(mul(Int(-1), right), left)
            return Binary("sub", left, right)
        return Binary(node.op, left, right)

    return visit(e)


def _round_sig(value: float, digits: int = 3) -> float:
    return float(f"{value:.{digits}g}")


def _is_zero_residual(e: Expr) -> bool:
    return is_number(e) and e.value == 0


def inject_noise_term(eq: Equation, cfg: PerturbConfig,
                      rng: Optional[np.random.Generator] = None) -> Tuple[Equation, NoiseProvenance]:
    """
    С вероятностью noise_prob добавляет к невязке слагаемое c·T.

    T выбирается равновероятно из библиотеки, c равномерно из
    noise_coeff_range (округляется до трёх значащих цифр).

    Returns:
        (новое уравнение, происхождение добавленного слагаемого)
    """
    if _is_zero_residual(eq.residual):
        raise ExprError("Нельзя добавить шум к нулевой невязке")
    rng = _rng(cfg, rng)
    if not rng.random() < cfg.noise_prob:
        return eq, NoiseProvenance(False)
    template = cfg.noise_term_library[int(rng.integers(len(cfg.noise_term_library)))]
    lo, hi = cfg.noise_coeff_range
    coefficient = _round_sig(float(rng.uniform(lo, hi)))
    logger.debug(f"Добавлено ошибочное слагаемое {coefficient}*{to_infix(template)}")
    noisy = Equation(add(eq.residual, mul(Const(coefficient), template)))
    return noisy, NoiseProvenance(True, template, coefficient)


def _is_coefficient(node: Expr) -> bool:
    # -1 оставляет перезапись вычитания, это знак, а не коэффициент
    return isinstance(node, Const) or isinstance(node, Int) and node.value != -1


def _mask(node: Expr) -> Expr:
    if isinstance(node, Unary):
        return Unary(node.fn, _mask(node.child))
    if isinstance(node, Deriv):
        return Deriv(_mask(node.child), node.var, node.order)
    if not isinstance(node, Binary):
        return node
    if node.op == "mul":
        left = PLACEHOLDER if _is_coefficient(node.left) else _mask(node.left)
        right = PLACEHOLDER if _is_coefficient(node.right) else _mask(node.right)
        return Binary("mul", left, right)
    return Binary(node.op, _mask(node.left), _mask(node.right))


def _has_placeholder(term: Expr) -> bool:
    return any(isinstance(f, Placeholder) for f in flatten(term, "mul"))


def _mask_unit_terms(node: Expr) -> Expr:
    if isinstance(node, Binary) and node.op in ("add", "sub"):
        return Binary(node.op, _mask_unit_terms(node.left), _mask_unit_terms(node.right))
    if _has_placeholder(node):
        return node
    return mul(PLACEHOLDER, node)


def mask_coefficients(eq: Equation, include_unit: bool = False) -> Equation:
    """
    Заменяет константы-множители на [?].

    Args:
        eq: Уравнение
        include_unit: Маскировать и слагаемые с неявным коэффициентом 1
            ([?]u_t + [?]cos(u)u_x)
    """
    residual = _mask(eq.residual)
    if include_unit:
        residual = _mask_unit_terms(residual)
    return Equation(residual)


def symbolic_setting(eq: Equation, name: str,
                     cfg: PerturbConfig) -> Tuple[TokenSeq, NoiseProvenance]:
    """
    Одна из пяти тестовых кодировок уравнения.

    manual          - ручной диалект как есть
    swapping        - ручной диалект после перестановки ветвей
    noisy_swapping  - ошибочное слагаемое, затем перестановка
    canonical       - канонический диалект
    noisy_canonical - ошибочное слагаемое, затем канонический диалект
    """
    if name not in SETTINGS:
        raise ConfigError(f"Неизвестная настройка '{name}', допустимы: {', '.join(SETTINGS)}")
    rng = np.random.default_rng(cfg.seed)
    provenance = NoiseProvenance(False)
    if name.startswith("noisy_"):
        eq, provenance = inject_noise_term(eq, cfg, rng)
    if name.endswith("swapping"):
        eq = Equation(swap_branches(eq.residual, cfg, rng))
    if name.endswith("canonical"):
        return to_canonical_tokens(eq), provenance
    return to_manual_tokens(eq), provenance


def perturb_many(equations: List[Equation], cfg: PerturbConfig) -> List[Expr]:
    """Перестановка ветвей для набора уравнений с независимыми seed."""
    result = []
    for index, eq in enumerate(equations):
        rng = np.random.default_rng(derive_seed(cfg.seed, index))
        result.append(swap_branches(eq.residual, cfg, rng))
    return result
