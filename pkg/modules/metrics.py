# /modules/metrics.py
"""
Метрики качества: относительная L2-ошибка, R², символьная ошибка на
полиномиальных суррогатах, доля валидных последовательностей и ошибка
временного ряда, а также нормализация траекторий.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P

from core.errors import DegenerateReference, ShapeMismatch, SymfilterError
from core.settings_manager import get_setting
from numerics.solver import ConservationLaw, SpaceTimeField, law_from_equation, solve_ensemble
from symbolic.evaluate import derivative_key, evaluate
from symbolic.expr import Equation
from symbolic.tokens import TokenSeq, from_tokens

logger = logging.getLogger("symfilter_metrics")

# Повторные попытки, если истинная невязка на суррогате почти нулевая
_MAX_SURROGATE_DRAWS = 100
_MIN_RESIDUAL_RMS = 1e-6


def rel_l2(u: np.ndarray, v: np.ndarray) -> float:
    """
    ||u - v||_2 / ||u||_2 по всем элементам.

    Raises:
        DegenerateReference: ||u||_2 = 0
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ShapeMismatch(f"Формы не совпадают: {u.shape} и {v.shape}")
    norm = np.linalg.norm(u.ravel())
    if norm == 0:
        raise DegenerateReference("Норма эталона равна нулю")
    return float(np.linalg.norm((u - v).ravel()) / norm)


def r2_score(targets: Sequence[np.ndarray], preds: Sequence[np.ndarray]) -> float:
    """R^2 = 1 - sum ||u_i - p_i||^2 / sum ||u_i - mean(u_i)||^2."""
    if len(targets) == 0 or len(targets) != len(preds):
        raise ShapeMismatch("Списки эталонов и предсказаний должны быть непустыми и одной длины")
    numerator = 0.0
    denominator = 0.0
    for target, pred in zip(targets, preds):
        target = np.asarray(target, dtype=float)
        pred = np.asarray(pred, dtype=float)
        if target.shape != pred.shape:
            raise ShapeMismatch(f"Формы не совпадают: {target.shape} и {pred.shape}")
        numerator += float(np.sum((target - pred) ** 2))
        denominator += float(np.sum((target - target.mean()) ** 2))
    if denominator == 0:
        raise DegenerateReference("Все эталоны постоянны, R^2 не определён")
    return 1.0 - numerator / denominator


@dataclass(frozen=True)
class PolySurrogate:
    """P(x,t) = (c0 + c1 t + c2 t^2)(c3 + c4 x + c5 x^2 + c6 x^3 + c7 x^4)"""
    c: Tuple[float, ...]

    def __post_init__(self):
        if len(self.c) != 8:
            raise ValueError(f"Нужно 8 коэффициентов, получено {len(self.c)}")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "PolySurrogate":
        return cls(tuple(float(v) for v in rng.uniform(-1.0, 1.0, size=8)))

    def environment(self, x: np.ndarray, t: np.ndarray) -> Dict[str, np.ndarray]:
        """Точные значения u, u_t, u_x, u_xx, u_xxx и переменных x, t."""
        time_poly = np.array(self.c[:3])
        space_poly = np.array(self.c[3:])
        time_val = P.polyval(t, time_poly)
        env = {
            "x": x,
            "t": t,
            "u": time_val * P.polyval(x, space_poly),
            derivative_key("t", 1): P.polyval(t, P.polyder(time_poly)) * P.polyval(x, space_poly),
        }
        for order in (1, 2, 3):
            env[derivative_key("x", order)] = time_val * P.polyval(x, P.polyder(space_poly, order))
        return env


def _sample_grid(points: int) -> Tuple[np.ndarray, np.ndarray]:
    axis = np.linspace(0.0, 1.0, points)
    x, t = np.meshgrid(axis, axis, indexing="ij")
    return x, t


def _as_equation(item: Union[Equation, TokenSeq]) -> Equation:
    if isinstance(item, TokenSeq):
        return from_tokens(item)
    return item


def symbolic_error(learned: Union[Equation, TokenSeq], truth: Equation,
                   n_polys: Optional[int] = None, grid_points: Optional[int] = None,
                   seed: Optional[int] = None) -> float:
    """
    Средняя относительная L2-ошибка невязок на случайных полиномах.

    Args:
        learned: Найденное уравнение (или его токены)
        truth: Истинное уравнение
        n_polys: Число полиномов (по умолчанию из настроек, 10)
        grid_points: Точек по каждой оси сетки на [0,1]^2 (по умолчанию 32)
        seed: Seed генератора коэффициентов полиномов

    Raises:
        DecodeError: токены не декодируются
        DegenerateReference: истинная невязка обращается в ноль на всех попытках
    """
    n_polys = n_polys or get_setting("metrics.n_polys") or 10
    grid_points = grid_points or get_setting("metrics.grid_points") or 32
    if seed is None:
        seed = get_setting("metrics.surrogate_seed") or 0

    learned_eq = _as_equation(learned)
    x, t = _sample_grid(grid_points)
    rng = np.random.default_rng(seed)
    errors = []
    for _ in range(n_polys):
        for _attempt in range(_MAX_SURROGATE_DRAWS):
            env = PolySurrogate.random(rng).environment(x, t)
            truth_val = np.broadcast_to(evaluate(truth, env), x.shape)
            if np.sqrt(np.mean(truth_val ** 2)) >= _MIN_RESIDUAL_RMS:
                break
        else:
            raise DegenerateReference("Истинная невязка обращается в ноль на суррогатах")
        errors.append(rel_l2(truth_val, np.broadcast_to(evaluate(learned_eq, env), x.shape)))
    return float(np.mean(errors))


def valid_fraction(generated: Sequence[Union[TokenSeq, Equation]], truths: Sequence[Equation],
                   **kwargs) -> float:
    """
    Доля последовательностей, которые декодируются и дают символьную ошибку < 100%.
    """
    if len(generated) != len(truths):
        raise ShapeMismatch("Списки сгенерированных и истинных уравнений разной длины")
    if not generated:
        return 0.0
    valid = 0
    for index, (item, truth) in enumerate(zip(generated, truths)):
        try:
            error = symbolic_error(item, truth, **kwargs)
        except SymfilterError as e:
            logger.warning(f"⚠️  Последовательность {index} невалидна: {e}")
            continue
        if np.isfinite(error) and error < 1.0:
            valid += 1
    return valid / len(generated)


def time_series_error(refined: Union[Equation, ConservationLaw], u0: np.ndarray,
                      truth_traj: SpaceTimeField) -> float:
    """
    Относительная L2-ошибка траектории, пересчитанной по уточнённому уравнению.

    Raises:
        NotSolvable: уравнение вне семейства законов сохранения
    """
    law = refined if isinstance(refined, ConservationLaw) else law_from_equation(refined)
    result = solve_ensemble(law.flux_kind, law.q1, law.q2, u0, truth_traj.grid, truth_traj.times)
    return rel_l2(truth_traj.values, result.values[:, 0, :])


# --- Нормализация ---

def normalize(seq: SpaceTimeField) -> Tuple[SpaceTimeField, float, float]:
    """
    (values - mean) / std по всем элементам.

    Raises:
        DegenerateReference: std = 0
    """
    mean = float(np.mean(seq.values))
    std = float(np.std(seq.values))
    if std == 0:
        raise DegenerateReference("Нулевое стандартное отклонение, нормализация невозможна")
    return apply_normalization(seq, mean, std), mean, std


def apply_normalization(seq: SpaceTimeField, mean: float, std: float) -> SpaceTimeField:
    """Нормализует другую траекторию (например, метку) статистиками входа."""
    return SpaceTimeField(seq.grid, seq.times, (seq.values - mean) / std)


def denormalize(seq: SpaceTimeField, mean: float, std: float) -> SpaceTimeField:
    return SpaceTimeField(seq.grid, seq.times, seq.values * std + mean)


def metrics_report(truth_traj: Optional[SpaceTimeField] = None, pred_traj: Optional[SpaceTimeField] = None,
                   learned: Optional[Equation] = None, truth: Optional[Equation] = None,
                   generated: Optional[List[TokenSeq]] = None) -> Dict[str, Optional[float]]:
    """Строка отчёта {rel_l2, r2, symbolic_error, valid_fraction, time_series_error}."""
    report: Dict[str, Optional[float]] = {
        "rel_l2": None, "r2": None, "symbolic_error": None, "valid_fraction": None, "time_series_error": None,
    }
    if truth_traj is not None and pred_traj is not None:
        report["rel_l2"] = rel_l2(truth_traj.values, pred_traj.values)
        report["r2"] = r2_score([truth_traj.values], [pred_traj.values])
    if learned is not None and truth is not None:
        report["symbolic_error"] = symbolic_error(learned, truth)
        if truth_traj is not None:
            report["time_series_error"] = time_series_error(learned, truth_traj.initial, truth_traj)
    if generated is not None and truth is not None:
        report["valid_fraction"] = valid_fraction(generated, [truth] * len(generated))
    return report
