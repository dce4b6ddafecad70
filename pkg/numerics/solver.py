# /numerics/solver.py
"""
Решатель скалярных законов сохранения на периодической сетке.

    u_t + q1 * (f(u))_x = q2 * u_xx,   f(u) in {u^2, u^3, sin(u)}

Конечные объёмы: поток Русанова (локальный Лакс-Фридрихс) плюс
центральная вторая разность для вязкости. Шаг по времени - Хойн (RK2)
из двух шагов явного Эйлера с адаптивным dt по условию CFL.

Все функции работают и с одним состоянием (nx,), и с ансамблем (M, nx):
коэффициенты q1, q2 транслируются по первой оси.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from core.config import SOLVER_CFL, SOLVER_DT_MAX
from core.errors import CFLViolation, ConfigError, NonFinite, NotSolvable, ShapeMismatch
from symbolic.canon import canonical_terms
from symbolic.expr import (
    FIELD, Binary, Const, Deriv, Equation, Expr, Field, Int, Unary, add, is_number, mul, power, sub,
)

logger = logging.getLogger("symfilter_solver")

ArrayLike = Union[np.ndarray, float]

# f(u) и f'(u) для каждого вида потока
_FLUXES: Dict[str, Tuple[Callable, Callable]] = {
    "quadratic": (lambda u: u * u, lambda u: 2.0 * u),
    "cubic": (lambda u: u * u * u, lambda u: 3.0 * u * u),
    "sine": (np.sin, np.cos),
}
FLUX_KINDS = tuple(_FLUXES)


@dataclass(frozen=True)
class ConservationLaw:
    """Закон сохранения u_t + q1 (f(u))_x = q2 u_xx"""
    flux_kind: str
    q1: float
    q2: float = 0.0

    def __post_init__(self):
        if self.flux_kind not in _FLUXES:
            raise ConfigError(f"Неизвестный вид потока '{self.flux_kind}', допустимы: {', '.join(FLUX_KINDS)}")
        if not (np.isfinite(self.q1) and np.isfinite(self.q2)):
            raise ConfigError(f"Коэффициенты должны быть конечными: q1={self.q1}, q2={self.q2}")
        if self.q2 < 0:
            raise ConfigError(f"Вязкость q2 не может быть отрицательной: {self.q2}")

    @property
    def inviscid(self) -> bool:
        return self.q2 == 0.0

    def flux(self, u: np.ndarray) -> np.ndarray:
        return self.q1 * _FLUXES[self.flux_kind][0](u)

    def wave_speed(self, u: np.ndarray) -> np.ndarray:
        return self.q1 * _FLUXES[self.flux_kind][1](u)

    def coefficients(self) -> np.ndarray:
        """Уточняемые коэффициенты: (q1,) для невязких законов, (q1, q2) иначе."""
        if self.inviscid:
            return np.array([self.q1])
        return np.array([self.q1, self.q2])

    def with_coefficients(self, values: Sequence[float]) -> "ConservationLaw":
        values = [float(v) for v in values]
        q2 = max(values[1], 0.0) if len(values) > 1 else self.q2
        return ConservationLaw(self.flux_kind, values[0], q2)

    def flux_expr(self) -> Expr:
        if self.flux_kind == "quadratic":
            return power(FIELD, 2)
        if self.flux_kind == "cubic":
            return power(FIELD, 3)
        return Unary("sin", FIELD)

    def to_equation(self) -> Equation:
        """Невязка u_t + q1*(f(u))_x - q2*u_xx."""
        residual = add(Deriv(FIELD, "t"), mul(Const(float(self.q1)), Deriv(self.flux_expr(), "x")))
        if not self.inviscid:
            residual = sub(residual, mul(Const(float(self.q2)), Deriv(FIELD, "x", 2)))
        return Equation(residual)


@dataclass(frozen=True)
class Grid1D:
    """Равномерная периодическая сетка из nx узлов: x_i = x0 + i*dx"""
    nx: int
    dx: float
    x0: float = 0.0
    periodic: bool = True

    def __post_init__(self):
        if self.nx < 8:
            raise ConfigError(f"Сетка должна содержать не меньше 8 ячеек, получено {self.nx}")
        if not self.dx > 0:
            raise ConfigError(f"Шаг сетки должен быть положительным, получено {self.dx}")
        if not self.periodic:
            raise ConfigError("Поддерживаются только периодические границы")

    @classmethod
    def uniform(cls, nx: int, x_f: float = 1.0, x0: float = 0.0) -> "Grid1D":
        return cls(nx=nx, dx=x_f / nx, x0=x0)

    @property
    def length(self) -> float:
        return self.nx * self.dx

    @property
    def nodes(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)


@dataclass
class SpaceTimeField:
    """Траектория: nt временных слоёв по nx узлов (по строкам - время)"""
    grid: Grid1D
    times: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.times), self.grid.nx):
            raise ShapeMismatch(f"Форма значений {self.values.shape} не совпадает с ({len(self.times)}, {self.grid.nx})")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ShapeMismatch("Моменты времени должны строго возрастать")

    @property
    def nt(self) -> int:
        return len(self.times)

    @property
    def initial(self) -> np.ndarray:
        return self.values[0]

    def window(self, start: int, stop: int) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.times[start:stop], self.values[start:stop])


# --- Схема ---

def _rhs(u: np.ndarray, flux_kind: str, q1: ArrayLike, q2: ArrayLike, dx: float) -> np.ndarray:
    """Полудискретная правая часть по последней оси u."""
    f, fprime = _FLUXES[flux_kind]
    flux = q1 * f(u)
    speed = np.abs(q1 * fprime(u))
    u_right = np.roll(u, -1, axis=-1)
    a_face = np.maximum(speed, np.roll(speed, -1, axis=-1))
    # F_{i+1/2}
    face = 0.5 * (flux + np.roll(flux, -1, axis=-1)) - 0.5 * a_face * (u_right - u)
    convection = -(face - np.roll(face, 1, axis=-1)) / dx
    diffusion = q2 * (u_right - 2.0 * u + np.roll(u, 1, axis=-1)) / (dx * dx)
    return convection + diffusion


def _stable_dt(flux_kind: str, u: np.ndarray, q1: ArrayLike, q2: ArrayLike, dx: float,
               cfl: float, dt_max: float) -> float:
    speed = float(np.max(np.abs(np.asarray(q1) * _FLUXES[flux_kind][1](u)))) if u.size else 0.0
    viscosity = float(np.max(q2)) if np.size(q2) else 0.0
    limits = []
    if speed > 0:
        limits.append(dx / speed)
    if viscosity > 0:
        limits.append(dx * dx / (2.0 * viscosity))
    if not limits:
        return dt_max
    return cfl * min(limits)


def cfl_dt(law: ConservationLaw, u: np.ndarray, grid: Grid1D,
           cfl: float = SOLVER_CFL, dt_max: float = SOLVER_DT_MAX) -> float:
    """
    Допустимый шаг: cfl * min(dx / max|q1 f'(u)|, dx^2 / (2 q2)).

    Если обе границы вырождены (нет переноса и вязкости), возвращает dt_max.
    """
    return _stable_dt(law.flux_kind, np.asarray(u, dtype=float), law.q1, law.q2, grid.dx, cfl, dt_max)


def step(law: ConservationLaw, u: np.ndarray, dt: float, grid: Grid1D) -> np.ndarray:
    """
    Один шаг явного Эйлера.

    Raises:
        CFLViolation: dt больше допустимого
        NonFinite: в результате появились inf/nan
    """
    u = np.asarray(u, dtype=float)
    limit = cfl_dt(law, u, grid)
    if dt > limit * (1.0 + 1e-12):
        raise CFLViolation(f"Шаг {dt:.3e} превышает допустимый {limit:.3e}")
    result = u + dt * _rhs(u, law.flux_kind, law.q1, law.q2, grid.dx)
    if not np.all(np.isfinite(result)):
        raise NonFinite("Решение содержит inf или nan")
    return result


def _heun(u: np.ndarray, dt: float, flux_kind: str, q1: ArrayLike, q2: ArrayLike, dx: float) -> np.ndarray:
    stage = u + dt * _rhs(u, flux_kind, q1, q2, dx)
    stage = stage + dt * _rhs(stage, flux_kind, q1, q2, dx)
    return 0.5 * (u + stage)


@dataclass
class EnsembleResult:
    """Решения для набора коэффициентов: values[k, i] - состояние частицы i в момент times[k]"""
    times: np.ndarray
    values: np.ndarray
    finite: np.ndarray


def solve_ensemble(flux_kind: str, q1: ArrayLike, q2: ArrayLike, u0: np.ndarray, grid: Grid1D,
                   times: Sequence[float], cfl: float = SOLVER_CFL,
                   dt_max: float = SOLVER_DT_MAX) -> EnsembleResult:
    """
    Решает M задач с общим шагом по времени.

    Args:
        flux_kind: Вид потока
        q1, q2: Коэффициенты формы (M,)
        u0: Начальное состояние (nx,) (общее) или (M, nx)
        grid: Сетка
        times: Неубывающие моменты вывода, times[0] - начальный момент

    Returns:
        EnsembleResult; строки, получившие inf/nan, помечены finite=False и заполнены nan
    """
    q1 = np.atleast_1d(np.asarray(q1, dtype=float))
    q2 = np.atleast_1d(np.asarray(q2, dtype=float))
    m = max(len(q1), len(q2))
    q1 = np.broadcast_to(q1, (m,)).reshape(m, 1)
    q2 = np.broadcast_to(q2, (m,)).reshape(m, 1)
    u = np.array(np.broadcast_to(np.asarray(u0, dtype=float), (m, grid.nx)))
    times = np.asarray(times, dtype=float)

    finite = np.all(np.isfinite(u), axis=1)
    u[~finite] = 0.0
    out = np.empty((len(times), m, grid.nx))
    out[0] = u
    t = float(times[0])
    for k in range(1, len(times)):
        target = float(times[k])
        while t < target:
            dt = min(_stable_dt(flux_kind, u[finite], q1[finite], q2[finite], grid.dx, cfl, dt_max), dt_max)
            if dt >= target - t:
                dt = target - t
                t = target
            else:
                t += dt
            u = _heun(u, dt, flux_kind, q1, q2, grid.dx)
            bad = ~np.all(np.isfinite(u), axis=1)
            if np.any(bad & finite):
                logger.debug(f"Решение потеряло конечность у {int(np.sum(bad & finite))} строк при t={t:.4f}")
                finite = finite & ~bad
                u[bad] = 0.0
        out[k] = u
    out[:, ~finite, :] = np.nan
    return EnsembleResult(times=times, values=out, finite=finite)


def solve(law: ConservationLaw, u0: np.ndarray, grid: Grid1D, t_final: float, nt_out: int) -> SpaceTimeField:
    """
    Интегрирует закон от 0 до t_final, записывая nt_out равномерных слоёв.

    Шаг по времени подрезается так, чтобы точно попадать в моменты вывода;
    values[0] совпадает с u0.

    Raises:
        NonFinite: решение разрушилось
    """
    if not t_final > 0:
        raise ConfigError(f"t_final должно быть положительным, получено {t_final}")
    if nt_out < 2:
        raise ConfigError(f"Нужно не меньше двух моментов вывода, получено {nt_out}")
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (grid.nx,):
        raise ConfigError(f"Начальное условие должно иметь форму ({grid.nx},), получено {u0.shape}")
    if not np.all(np.isfinite(u0)):
        raise NonFinite("Начальное условие содержит inf или nan")
    times = np.linspace(0.0, t_final, nt_out)
    result = solve_ensemble(law.flux_kind, law.q1, law.q2, u0, grid, times)
    if not result.finite[0]:
        raise NonFinite(f"Решение для {law} разрушилось")
    return SpaceTimeField(grid, times, result.values[:, 0, :])


def advance(law: ConservationLaw, u: np.ndarray, grid: Grid1D, dt_obs: float) -> np.ndarray:
    """Оператор наблюдения H: состояние через dt_obs."""
    result = solve_ensemble(law.flux_kind, law.q1, law.q2, u, grid, [0.0, dt_obs])
    if not result.finite[0]:
        raise NonFinite(f"Решение для {law} разрушилось")
    return result.values[1, 0]


# --- Связь с символьной записью ---

def _coefficient_value(coef: Expr) -> float:
    if not is_number(coef):
        raise NotSolvable("Замаскированный коэффициент нельзя использовать в решателе")
    return float(coef.value)


def _flux_kind_of(factors: Tuple[Expr, ...]) -> Optional[Tuple[str, float]]:
    """Вид потока и множитель f'(u) при u_x для слагаемого переноса."""
    u_x = Deriv(FIELD, "x", 1)
    if len(factors) != 2 or factors[1] != u_x:
        return None
    head = factors[0]
    if isinstance(head, Field):
        return "quadratic", 2.0
    if isinstance(head, Binary) and head.op == "pow" and head.left == FIELD and head.right == Int(2):
        return "cubic", 3.0
    if isinstance(head, Unary) and head.fn == "cos" and head.child == FIELD:
        return "sine", 1.0
    return None


def law_from_equation(eq: Equation) -> ConservationLaw:
    """
    Распознаёт закон сохранения по канонической форме невязки.

    Допустимые слагаемые: a*u_t, b*u*u_x | b*u^2*u_x | b*cos(u)*u_x, c*u_xx.

    Raises:
        NotSolvable: уравнение не из поддерживаемого семейства
    """
    time_coef = None
    flux: Optional[Tuple[str, float]] = None
    flux_coef = 0.0
    diffusion_coef = 0.0
    for coef, factors in canonical_terms(eq):
        if factors == (Deriv(FIELD, "t", 1),):
            time_coef = _coefficient_value(coef)
            continue
        if factors == (Deriv(FIELD, "x", 2),):
            diffusion_coef = _coefficient_value(coef)
            continue
        kind = _flux_kind_of(factors)
        if kind is None or flux is not None:
            raise NotSolvable(f"Слагаемое вне семейства законов сохранения: {factors}")
        flux = kind
        flux_coef = _coefficient_value(coef)
    if not time_coef:
        raise NotSolvable("В уравнении нет слагаемого u_t")
    if flux is None:
        raise NotSolvable("В уравнении нет слагаемого переноса (f(u))_x")
    q1 = flux_coef / (flux[1] * time_coef)
    q2 = -diffusion_coef / time_coef
    if q2 < 0:
        raise NotSolvable(f"Отрицательная вязкость {q2} не поддерживается")
    return ConservationLaw(flux[0], q1, q2)
