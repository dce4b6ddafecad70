# /numerics/particle_filter.py
"""
Фильтр частиц для уточнения коэффициентов уравнения по наблюдаемой траектории.

Один шаг уточнения k = 1..steps:
    1. propagate - случайное блуждание коэффициентов (дисперсия process_var);
    2. reweight  - каждая частица решает уравнение от кадра k-1 до кадра k,
                   вес пропорционален гауссовому правдоподобию невязки;
    3. resample  - мультиномиальная перевыборка через обратную функцию распределения.
Результат - среднее ансамбля после последнего шага.

Все M прямых решений считаются одним векторизованным вызовом solve_ensemble,
поэтому результат не зависит от числа потоков.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.config import (
    FILTER_INIT_HALFWIDTH, FILTER_LIKELIHOOD, FILTER_OBS_SCALE, FILTER_PARTICLES,
    FILTER_PROCESS_VAR, FILTER_STEPS,
)
from core.errors import AllWeightsDegenerate, ConfigError, ZeroCoefficient
from numerics.solver import ConservationLaw, Grid1D, SpaceTimeField, solve_ensemble

logger = logging.getLogger("symfilter_filter")

LIKELIHOODS = ("pointwise", "field")

# Номера стадий для независимых случайных потоков (seed, step, stage)
_STAGE_INIT = 0
_STAGE_PROPAGATE = 1
_STAGE_RESAMPLE = 2


@dataclass
class FilterConfig:
    """Параметры фильтра частиц"""
    particles: int = FILTER_PARTICLES
    steps: int = FILTER_STEPS
    process_var: float = FILTER_PROCESS_VAR
    obs_scale: float = FILTER_OBS_SCALE
    init_rel_halfwidth: float = FILTER_INIT_HALFWIDTH
    seed: int = 0
    # pointwise: независимый гауссов шум в каждом узле; field: одна гауссиана на L2-норму невязки
    likelihood: str = FILTER_LIKELIHOOD

    def __post_init__(self):
        if self.particles < 2:
            raise ConfigError(f"Нужно не меньше 2 частиц, получено {self.particles}")
        if self.steps < 1:
            raise ConfigError(f"Нужен хотя бы один шаг уточнения, получено {self.steps}")
        if not self.process_var > 0:
            raise ConfigError(f"process_var должна быть положительной, получено {self.process_var}")
        if not self.obs_scale > 0:
            raise ConfigError(f"obs_scale должна быть положительной, получено {self.obs_scale}")
        if self.init_rel_halfwidth < 0:
            raise ConfigError(f"init_rel_halfwidth не может быть отрицательной: {self.init_rel_halfwidth}")
        if self.likelihood not in LIKELIHOODS:
            raise ConfigError(f"Неизвестное правдоподобие '{self.likelihood}', допустимы: {', '.join(LIKELIHOODS)}")


@dataclass
class ParticleEnsemble:
    """M частиц по d коэффициентов и их нормированные веса"""
    particles: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.particles.shape[0]

    def mean(self) -> np.ndarray:
        return self.particles.mean(axis=0)

    def spread(self) -> np.ndarray:
        return self.particles.std(axis=0)

    def ess(self) -> float:
        """Эффективный размер выборки 1 / sum(p_i^2)."""
        return float(1.0 / np.sum(self.weights ** 2))


@dataclass(frozen=True)
class LawTemplate:
    """
    Привязка вектора коэффициентов к закону сохранения.

    Для невязких законов уточняется только q1, для вязких - (q1, q2);
    отрицательная вязкость обрезается до нуля.
    """
    flux_kind: str
    refine_viscosity: bool = False
    fixed_q2: float = 0.0

    @classmethod
    def from_law(cls, law: ConservationLaw) -> "LawTemplate":
        return cls(law.flux_kind, refine_viscosity=not law.inviscid, fixed_q2=law.q2)

    @property
    def dimension(self) -> int:
        return 2 if self.refine_viscosity else 1

    def coefficient_arrays(self, particles: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        particles = np.atleast_2d(particles)
        q1 = particles[:, 0]
        if self.refine_viscosity:
            q2 = np.clip(particles[:, 1], 0.0, None)
        else:
            q2 = np.full_like(q1, self.fixed_q2)
        return q1, q2

    def law(self, coefficients: Sequence[float]) -> ConservationLaw:
        q1, q2 = self.coefficient_arrays(np.asarray(coefficients, dtype=float).reshape(1, -1))
        return ConservationLaw(self.flux_kind, float(q1[0]), float(q2[0]))


@dataclass
class ObservationSeq:
    """Наблюдаемые кадры u(., t_k)"""
    grid: Grid1D
    times: np.ndarray
    frames: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.frames = np.asarray(self.frames, dtype=float)
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ConfigError("Моменты наблюдений должны строго возрастать")

    @classmethod
    def from_field(cls, traj: SpaceTimeField, count: Optional[int] = None) -> "ObservationSeq":
        count = traj.nt if count is None else count
        return cls(traj.grid, traj.times[:count], traj.values[:count])

    def __len__(self) -> int:
        return len(self.times)


@dataclass
class FilterResult:
    coefficients: np.ndarray
    ess_per_step: List[float]
    spread_per_step: List[List[float]]
    initial_spread: np.ndarray
    ensemble: ParticleEnsemble = field(repr=False)

    @property
    def spread(self) -> np.ndarray:
        return self.ensemble.spread()


def stage_rng(seed: int, step: int, stage: int) -> np.random.Generator:
    """Независимый поток случайных чисел для (seed, шаг, стадия)."""
    return np.random.default_rng([seed, step, stage])


def init_ensemble(alpha0: Sequence[float], cfg: FilterConfig,
                  rng: Optional[np.random.Generator] = None) -> ParticleEnsemble:
    """
    Начальное облако: координата j равномерна на [(1-h)a_j, (1+h)a_j].

    Raises:
        ZeroCoefficient: какой-то из a_j равен нулю
    """
    alpha0 = np.atleast_1d(np.asarray(alpha0, dtype=float))
    if np.any(alpha0 == 0):
        raise ZeroCoefficient(f"Относительный интервал вырождается для нулевого коэффициента: {alpha0.tolist()}")
    rng = rng if rng is not None else stage_rng(cfg.seed, 0, _STAGE_INIT)
    h = cfg.init_rel_halfwidth
    lo = np.minimum((1 - h) * alpha0, (1 + h) * alpha0)
    hi = np.maximum((1 - h) * alpha0, (1 + h) * alpha0)
    particles = rng.uniform(lo, hi, size=(cfg.particles, len(alpha0)))
    weights = np.full(cfg.particles, 1.0 / cfg.particles)
    return ParticleEnsemble(particles, weights)


def propagate(ens: ParticleEnsemble, cfg: FilterConfig,
              rng: Optional[np.random.Generator] = None) -> ParticleEnsemble:
    """Случайное блуждание: к каждой координате добавляется N(0, process_var)."""
    rng = rng if rng is not None else stage_rng(cfg.seed, 1, _STAGE_PROPAGATE)
    noise = rng.normal(0.0, np.sqrt(cfg.process_var), size=ens.particles.shape)
    return ParticleEnsemble(ens.particles + noise, ens.weights.copy())


def observation_sigma(u_initial: np.ndarray, grid: Grid1D, cfg: FilterConfig) -> float:
    """eps = obs_scale * ||u(., 0)||_2 (дискретная норма sqrt(sum u^2 dx))."""
    norm = float(np.sqrt(np.sum(np.asarray(u_initial) ** 2) * grid.dx))
    if norm == 0:
        raise ConfigError("Начальное наблюдение тождественно равно нулю, масштаб шума не определён")
    return cfg.obs_scale * norm


def log_likelihood(predicted: np.ndarray, observed: np.ndarray, sigma: float, dx: float,
                   kind: str = "pointwise") -> np.ndarray:
    """
    Логарифм правдоподобия для каждой строки predicted (M, nx).

    pointwise: -sum_i r_i^2 / (2 eps^2)
    field:     -||r||_2^2 / (2 eps^2), ||r||_2^2 = sum_i r_i^2 dx
    Нечисловые строки получают -inf.
    """
    residual = np.asarray(predicted) - np.asarray(observed)
    with np.errstate(invalid="ignore", over="ignore"):
        squared = np.sum(residual * residual, axis=-1)
    if kind == "field":
        squared = squared * dx
    result = -squared / (2.0 * sigma * sigma)
    return np.where(np.isfinite(result), result, -np.inf)


def importance_weights(log_weights: np.ndarray) -> np.ndarray:
    """
    Нормированные веса exp(l_i - max l).

    Raises:
        AllWeightsDegenerate: ни одного конечного логарифма веса
    """
    log_weights = np.asarray(log_weights, dtype=float)
    finite = np.isfinite(log_weights)
    if not np.any(finite):
        raise AllWeightsDegenerate("Все частицы получили нулевой вес")
    shifted = np.where(finite, log_weights - np.max(log_weights[finite]), -np.inf)
    weights = np.exp(shifted)
    return weights / np.sum(weights)


def reweight(ens: ParticleEnsemble, u_prev: np.ndarray, u_obs: np.ndarray, template: LawTemplate,
             cfg: FilterConfig, dt_obs: float, grid: Grid1D, sigma: float) -> ParticleEnsemble:
    """
    Пересчитывает веса по наблюдению u_obs через dt_obs после u_prev.

    Каждая частица решает свой закон от u_prev; разрушившиеся решения
    получают нулевой вес.

    Raises:
        AllWeightsDegenerate: все решения разрушились
    """
    q1, q2 = template.coefficient_arrays(ens.particles)
    result = solve_ensemble(template.flux_kind, q1, q2, u_prev, grid, [0.0, dt_obs])
    if not np.all(result.finite):
        logger.warning(f"⚠️  {int(np.sum(~result.finite))} из {ens.size} частиц дали нефинитное решение")
    log_w = log_likelihood(result.values[1], u_obs, sigma, grid.dx, cfg.likelihood)
    return ParticleEnsemble(ens.particles.copy(), importance_weights(log_w))


def resample(ens: ParticleEnsemble, cfg: FilterConfig, rng: Optional[np.random.Generator] = None,
             size: Optional[int] = None) -> ParticleEnsemble:
    """
    Мультиномиальная перевыборка по эмпирической функции распределения весов.

    Частица i в среднем повторяется size * p_i раз; веса после перевыборки равны.
    """
    rng = rng if rng is not None else stage_rng(cfg.seed, 1, _STAGE_RESAMPLE)
    size = ens.size if size is None else size
    cdf = np.cumsum(ens.weights)
    cdf[-1] = 1.0
    draws = rng.random(size)
    index = np.minimum(np.searchsorted(cdf, draws, side="right"), ens.size - 1)
    return ParticleEnsemble(ens.particles[index].copy(), np.full(size, 1.0 / size))


def refine(alpha0: Sequence[float], obs: ObservationSeq, template: LawTemplate,
           cfg: FilterConfig) -> FilterResult:
    """
    Уточняет коэффициенты по кадрам obs[0..steps].

    Args:
        alpha0: Начальная оценка коэффициентов
        obs: Наблюдения, не меньше steps+1 кадров
        template: Привязка коэффициентов к закону сохранения
        cfg: Параметры фильтра

    Returns:
        FilterResult со средним ансамбля и диагностикой по шагам
    """
    if len(obs) < cfg.steps + 1:
        raise ConfigError(f"Для {cfg.steps} шагов нужно {cfg.steps + 1} кадров, получено {len(obs)}")
    alpha0 = np.atleast_1d(np.asarray(alpha0, dtype=float))
    if len(alpha0) != template.dimension:
        raise ConfigError(f"Ожидалось {template.dimension} коэффициентов, получено {len(alpha0)}")

    sigma = observation_sigma(obs.frames[0], obs.grid, cfg)
    ens = init_ensemble(alpha0, cfg)
    initial_spread = ens.spread()
    ess_per_step: List[float] = []
    spread_per_step: List[List[float]] = []
    for k in range(1, cfg.steps + 1):
        ens = propagate(ens, cfg, stage_rng(cfg.seed, k, _STAGE_PROPAGATE))
        dt_obs = float(obs.times[k] - obs.times[k - 1])
        ens = reweight(ens, obs.frames[k - 1], obs.frames[k], template, cfg, dt_obs, obs.grid, sigma)
        ess_per_step.append(ens.ess())
        ens = resample(ens, cfg, stage_rng(cfg.seed, k, _STAGE_RESAMPLE))
        spread_per_step.append(ens.spread().tolist())
        logger.debug(f"Шаг {k}: ESS={ess_per_step[-1]:.1f}, среднее={ens.mean().tolist()}")

    refined = ens.mean()
    logger.info(f"Уточнение завершено: {alpha0.tolist()} -> {refined.tolist()}")
    return FilterResult(refined, ess_per_step, spread_per_step, initial_spread, ens)


def trajectory_misfit(candidates: np.ndarray, obs: ObservationSeq, template: LawTemplate,
                      steps: int) -> np.ndarray:
    """
    Сумма квадратов отклонений sum_k ||u_obs(t_k) - H^k(a, u0)||^2 для каждого кандидата.

    Используется как переборный эталон для проверки фильтра.
    """
    candidates = np.asarray(candidates, dtype=float).reshape(len(candidates), -1)
    q1, q2 = template.coefficient_arrays(candidates)
    result = solve_ensemble(template.flux_kind, q1, q2, obs.frames[0], obs.grid, obs.times[:steps + 1])
    diff = result.values[1:] - obs.frames[1:steps + 1, None, :]
    misfit = np.sum(diff * diff, axis=(0, 2))
    return np.where(result.finite, misfit, np.inf)


def grid_search(alpha0: float, obs: ObservationSeq, template: LawTemplate, steps: int,
                rel_halfwidth: float = 0.1, points: int = 2001) -> float:
    """Коэффициент с наименьшим отклонением на равномерной сетке [(1-h)a0, (1+h)a0]."""
    candidates = np.linspace((1 - rel_halfwidth) * alpha0, (1 + rel_halfwidth) * alpha0, points)
    misfit = trajectory_misfit(candidates[:, None], obs, template, steps)
    return float(candidates[int(np.argmin(misfit))])
