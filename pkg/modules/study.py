# /modules/study.py
"""
Сравнение ошибок с фильтром частиц и без него.

Для каждого семейства и испытания: генерируется истинное уравнение и
траектория, коэффициенты искажаются на заданную относительную ошибку,
затем уточняются фильтром. Символьная ошибка и ошибка временного ряда
считаются для искажённых и для уточнённых коэффициентов.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from core.config import DEFAULT_THREADS
from core.errors import ConfigError
from modules.datagen import TABLE_FAMILIES, FamilySpec, sample_ic, sample_params
from modules.metrics import symbolic_error, time_series_error
from numerics.particle_filter import FilterConfig, LawTemplate, ObservationSeq, refine
from numerics.solver import solve
from texts import STUDY_COLUMNS

logger = logging.getLogger("symfilter_metrics")


@dataclass
class StudyConfig:
    families: Sequence[str] = TABLE_FAMILIES
    trials: int = 20
    coeff_error: float = 0.03
    seed: int = 0
    filter: FilterConfig = field(default_factory=FilterConfig)
    threads: int = DEFAULT_THREADS

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"Число испытаний должно быть >= 1, получено {self.trials}")
        if not 0 <= self.coeff_error < 1:
            raise ConfigError(f"Относительная ошибка коэффициентов должна лежать в [0, 1): {self.coeff_error}")
        if not self.families:
            raise ConfigError("Не выбрано ни одного семейства")


@dataclass
class TrialResult:
    family: str
    trial: int
    true_coefficients: List[float]
    initial_coefficients: List[float]
    refined_coefficients: List[float]
    symbolic_without: float
    symbolic_with: float
    series_without: float
    series_with: float
    ess_per_step: List[float]
    spread_per_step: List[List[float]]


def run_trial(spec: FamilySpec, family_index: int, trial: int, cfg: StudyConfig) -> TrialResult:
    """Одно испытание: генерация, искажение коэффициентов, уточнение, метрики."""
    rng = np.random.default_rng([cfg.seed, family_index, trial])
    q1, q2 = sample_params(spec, rng)
    u0 = sample_ic(spec, rng)
    law_true = spec.law(q1, q2)
    traj = solve(law_true, u0, spec.grid(), spec.t_f, spec.nt)

    template = LawTemplate.from_law(law_true)
    alpha_true = law_true.coefficients()
    signs = rng.choice([-1.0, 1.0], size=len(alpha_true))
    alpha0 = alpha_true * (1.0 + signs * cfg.coeff_error)

    filter_cfg = replace(cfg.filter, seed=int(rng.integers(2 ** 31)))
    obs = ObservationSeq.from_field(traj, filter_cfg.steps + 1)
    result = refine(alpha0, obs, template, filter_cfg)

    law_initial = template.law(alpha0)
    law_refined = template.law(result.coefficients)
    truth_eq = law_true.to_equation()
    logger.debug(f"{spec.name} #{trial}: {alpha_true.tolist()} -> {alpha0.tolist()} -> {result.coefficients.tolist()}")
    return TrialResult(
        family=spec.name,
        trial=trial,
        true_coefficients=alpha_true.tolist(),
        initial_coefficients=alpha0.tolist(),
        refined_coefficients=result.coefficients.tolist(),
        symbolic_without=symbolic_error(law_initial.to_equation(), truth_eq),
        symbolic_with=symbolic_error(law_refined.to_equation(), truth_eq),
        series_without=time_series_error(law_initial, u0, traj),
        series_with=time_series_error(law_refined, u0, traj),
        ess_per_step=result.ess_per_step,
        spread_per_step=result.spread_per_step,
    )


def run_study(cfg: StudyConfig) -> List[TrialResult]:
    """Все испытания по всем семействам; порядок результатов не зависит от числа потоков."""
    specs = [FamilySpec.from_settings(name) for name in cfg.families]
    jobs = [(spec, fam_idx, trial) for fam_idx, spec in enumerate(specs) for trial in range(cfg.trials)]
    logger.info(f"Исследование: {len(specs)} семейств x {cfg.trials} испытаний, ошибка {cfg.coeff_error:.1%}")
    with ThreadPoolExecutor(max_workers=max(1, cfg.threads)) as pool:
        return list(pool.map(lambda job: run_trial(job[0], job[1], job[2], cfg), jobs))


def summary_table(results: List[TrialResult]) -> pd.DataFrame:
    """
    Средние ошибки по семействам (в процентах), по строке на семейство.

    Колонки: family, type, expression, symbolic_without, symbolic_with,
    series_without, series_with, trials.
    """
    frame = pd.DataFrame([
        {
            "family": r.family,
            "symbolic_without": r.symbolic_without,
            "symbolic_with": r.symbolic_with,
            "series_without": r.series_without,
            "series_with": r.series_with,
        }
        for r in results
    ])
    grouped = frame.groupby("family", sort=False)
    table = (grouped.mean() * 100.0).reset_index()
    table["trials"] = grouped.size().values
    specs = {name: FamilySpec.from_settings(name) for name in table["family"]}
    table.insert(1, "type", [specs[name].title for name in table["family"]])
    table.insert(2, "expression", [_family_expression(specs[name]) for name in table["family"]])
    return table[list(STUDY_COLUMNS)]


def _family_expression(spec: FamilySpec) -> str:
    flux = {"quadratic": "u^2", "cubic": "u^3", "sine": "sin(u)"}[spec.flux]
    if spec.q2 == 0:
        return f"u_t + q*({flux})_x = 0"
    return f"u_t + q1*({flux})_x = q2*u_xx"


def curves_table(results: List[TrialResult]) -> pd.DataFrame:
    """ESS и разброс ансамбля по шагам фильтра (материал для графиков)."""
    rows = []
    for r in results:
        for step, (ess, spread) in enumerate(zip(r.ess_per_step, r.spread_per_step), start=1):
            row: Dict[str, Optional[float]] = {"family": r.family, "trial": r.trial, "step": step, "ess": ess}
            for j, value in enumerate(spread):
                row[f"spread_{j + 1}"] = value
            rows.append(row)
    return pd.DataFrame(rows)


def trials_table(results: List[TrialResult]) -> pd.DataFrame:
    return pd.DataFrame([
        {
            "family": r.family,
            "trial": r.trial,
            "true": r.true_coefficients,
            "initial": r.initial_coefficients,
            "refined": r.refined_coefficients,
            "symbolic_without": r.symbolic_without,
            "symbolic_with": r.symbolic_with,
            "series_without": r.series_without,
            "series_with": r.series_with,
        }
        for r in results
    ])
