# /modules/datagen.py
"""
Генерация наборов данных из шести семейств законов сохранения.

Для каждой тройки (семейство, параметры, начальное условие) решается
уравнение до t_f и записываются траектория PDEGRID1 и JSON уравнения;
после завершения всех задач пишется manifest.json.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from core.config import DEFAULT_THREADS
from core.errors import ConfigError, NonFinite, NotSolvable
from core.settings_manager import DEFAULT_SETTINGS, get_setting
from numerics.grid_io import write_grid
from numerics.solver import ConservationLaw, Grid1D, law_from_equation, solve
from symbolic.expr import Equation, equation_to_infix
from symbolic.parser import parse_infix
from symbolic.tokens import to_canonical_tokens

logger = logging.getLogger("symfilter_data")

FAMILY_NAMES = ("burgers", "inviscid_burgers", "cl_cubic", "icl_cubic", "cl_sine", "icl_sine")
INVISCID_FAMILIES = ("inviscid_burgers", "icl_cubic", "icl_sine")
# Семейства, для которых сравнивается качество с фильтром и без
TABLE_FAMILIES = ("burgers", "inviscid_burgers", "cl_cubic", "icl_cubic", "icl_sine")
FAMILY_TITLES = {
    "burgers": "Burgers'",
    "inviscid_burgers": "Inviscid Burgers'",
    "cl_cubic": "CL w. cubic flux",
    "icl_cubic": "ICL w. cubic flux",
    "cl_sine": "CL w. sine flux",
    "icl_sine": "ICL w. sine flux",
}
SPLITS = {"train": 0, "test": 1}
IC_MODES = 5


@dataclass
class FamilySpec:
    """Семейство уравнений и его сетка"""
    name: str
    flux: str
    q1: float
    q2: float = 0.0
    t_f: float = 1.0
    x_f: float = 1.0
    nx: int = 128
    nt: int = 32

    def __post_init__(self):
        if self.name not in FAMILY_NAMES:
            raise ConfigError(f"Неизвестное семейство '{self.name}', допустимы: {', '.join(FAMILY_NAMES)}")
        if self.name in INVISCID_FAMILIES and self.q2 != 0:
            raise ConfigError(f"У невязкого семейства {self.name} q2 должен быть 0, получено {self.q2}")
        if self.nx < 8 or self.nt < 2:
            raise ConfigError(f"Слишком маленькая сетка: nx={self.nx}, nt={self.nt}")
        if not (self.t_f > 0 and self.x_f > 0):
            raise ConfigError(f"t_f и x_f должны быть положительными: {self.t_f}, {self.x_f}")

    @classmethod
    def from_settings(cls, name: str) -> "FamilySpec":
        section = get_setting(f"families.{name}")
        if section is None:
            if name not in DEFAULT_SETTINGS["families"]:
                raise ConfigError(f"Неизвестное семейство '{name}'")
            section = DEFAULT_SETTINGS["families"][name]
        return cls(name=name, **section)

    @property
    def base_coeffs(self) -> Tuple[float, float]:
        return self.q1, self.q2

    @property
    def title(self) -> str:
        return FAMILY_TITLES[self.name]

    def grid(self) -> Grid1D:
        return Grid1D.uniform(self.nx, self.x_f)

    def law(self, q1: Optional[float] = None, q2: Optional[float] = None) -> ConservationLaw:
        return ConservationLaw(self.flux, self.q1 if q1 is None else q1, self.q2 if q2 is None else q2)


@dataclass
class DatasetManifest:
    """Что генерировать: семейства, число параметров и начальных условий, seed, часть"""
    families: List[FamilySpec]
    params_per_family: int
    ics_per_param: int
    seed: int = 0
    split: str = "train"

    def __post_init__(self):
        if not self.families:
            raise ConfigError("Список семейств пуст")
        if self.params_per_family < 1 or self.ics_per_param < 1:
            raise ConfigError("Число параметров и начальных условий должно быть >= 1")
        if self.split not in SPLITS:
            raise ConfigError(f"Неизвестная часть '{self.split}', допустимы: train, test")

    @classmethod
    def desk_scale(cls, split: str = "train", seed: int = 0,
                   family_names: Optional[List[str]] = None) -> "DatasetManifest":
        """Уменьшенный набор: 6x64x8 для train, 6x16x4 для test."""
        names = family_names or list(FAMILY_NAMES)
        families = [FamilySpec.from_settings(name) for name in names]
        if split == "test":
            return cls(families, 16, 4, seed, split)
        return cls(families, 64, 8, seed, split)

    def to_json(self) -> Dict[str, Any]:
        return {
            "families": [asdict(spec) for spec in self.families],
            "params_per_family": self.params_per_family,
            "ics_per_param": self.ics_per_param,
            "seed": self.seed,
            "split": self.split,
        }


def sample_params(spec: FamilySpec, rng: np.random.Generator) -> Tuple[float, float]:
    """Каждый ненулевой базовый коэффициент умножается на U(0.9, 1.1)."""
    result = []
    for base in spec.base_coeffs:
        result.append(float(base * rng.uniform(0.9, 1.1)) if base != 0 else 0.0)
    return result[0], result[1]


def sine_modes(x: np.ndarray, amplitudes: np.ndarray, phases: np.ndarray, x_f: float) -> np.ndarray:
    """sum_j a_j sin(2 pi j x / x_f + phi_j), j = 1..len(amplitudes)."""
    modes = np.arange(1, len(amplitudes) + 1)[:, None]
    return np.sum(amplitudes[:, None] * np.sin(2 * np.pi * modes * x[None, :] / x_f + phases[:, None]), axis=0)


def sample_ic(spec: FamilySpec, rng: np.random.Generator) -> np.ndarray:
    """Сумма пяти синусоид со случайными амплитудами и фазами, нормированная на max|u0| = 1."""
    amplitudes = rng.uniform(-0.5, 0.5, size=IC_MODES)
    phases = rng.uniform(0.0, 2 * np.pi, size=IC_MODES)
    u0 = sine_modes(spec.grid().nodes, amplitudes, phases, spec.x_f)
    peak = np.max(np.abs(u0))
    if peak == 0:
        raise ConfigError("Начальное условие тождественно равно нулю")
    return u0 / peak


def equation_record(equation_id: str, spec: FamilySpec, law: ConservationLaw) -> Dict[str, Any]:
    eq = law.to_equation()
    half = spec.nt // 2
    return {
        "id": equation_id,
        "family": spec.name,
        "coefficients": {"q1": law.q1, "q2": law.q2},
        "infix": equation_to_infix(eq),
        "canonical_tokens": list(to_canonical_tokens(eq).tokens),
        "t_f": spec.t_f,
        "x_f": spec.x_f,
        "input_window": [0, half],
        "label_window": [half, spec.nt],
    }


def read_equation_file(path: Union[str, Path]) -> Tuple[Equation, ConservationLaw, Dict[str, Any]]:
    """
    Читает JSON уравнения.

    Закон берётся из family + coefficients, а если их нет - распознаётся по полю infix.

    Raises:
        NotSolvable: уравнение не относится к законам сохранения
    """
    with open(path, "r", encoding="utf-8") as f:
        record = json.load(f)
    if "family" in record and "coefficients" in record:
        spec = FamilySpec.from_settings(record["family"])
        coefficients = record["coefficients"]
        law = spec.law(float(coefficients.get("q1", spec.q1)), float(coefficients.get("q2", 0.0)))
        return law.to_equation(), law, record
    if "infix" not in record:
        raise NotSolvable(f"В {path} нет ни family/coefficients, ни infix")
    eq = parse_infix(record["infix"], implicit_mul=True)
    return eq, law_from_equation(eq), record


@dataclass
class _Task:
    equation_id: str
    spec: FamilySpec
    seeds: Tuple[int, ...]
    ic_seed: Tuple[int, ...]


@dataclass
class DatasetIndex:
    equations: List[str] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)


def _run_task(task: _Task, out_dir: Path) -> Tuple[str, bool]:
    q1, q2 = sample_params(task.spec, np.random.default_rng(list(task.seeds)))
    u0 = sample_ic(task.spec, np.random.default_rng(list(task.ic_seed)))
    law = task.spec.law(q1, q2)
    try:
        traj = solve(law, u0, task.spec.grid(), task.spec.t_f, task.spec.nt)
    except NonFinite as e:
        logger.warning(f"⚠️  Уравнение {task.equation_id} пропущено: {e}")
        return task.equation_id, False
    write_grid(out_dir / f"traj_{task.equation_id}.grid", traj)
    record = equation_record(task.equation_id, task.spec, law)
    with open(out_dir / f"eq_{task.equation_id}.json", "w", encoding="utf-8") as f:
        json.dump(record, f, ensure_ascii=False, indent=2)
    return task.equation_id, True


def _tasks(manifest: DatasetManifest) -> List[_Task]:
    split_code = SPLITS[manifest.split]
    tasks = []
    for fam_idx, spec in enumerate(manifest.families):
        for p in range(manifest.params_per_family):
            for ic in range(manifest.ics_per_param):
                equation_id = f"{manifest.split}_{spec.name}_{p:03d}_{ic:03d}"
                tasks.append(_Task(
                    equation_id=equation_id,
                    spec=spec,
                    seeds=(manifest.seed, split_code, fam_idx, p),
                    ic_seed=(manifest.seed, split_code, fam_idx, p, ic),
                ))
    return tasks


def generate(manifest: DatasetManifest, out_dir: Union[str, Path],
             threads: int = DEFAULT_THREADS) -> DatasetIndex:
    """
    Генерирует набор данных в каталоге out_dir.

    Каждая задача получает собственные seed из (seed, часть, семейство, параметр, НУ),
    поэтому содержимое каталога не зависит от числа потоков.

    Returns:
        DatasetIndex со списком записанных и пропущенных уравнений
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = _tasks(manifest)
    logger.info(f"Генерация {len(tasks)} уравнений ({manifest.split}) в {out_dir}, потоков: {threads}")

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(lambda task: _run_task(task, out_dir), tasks))

    index = DatasetIndex()
    for equation_id, ok in results:
        (index.equations if ok else index.skipped).append(equation_id)

    manifest_json = manifest.to_json()
    manifest_json["equations"] = index.equations
    manifest_json["skipped"] = index.skipped
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest_json, f, ensure_ascii=False, indent=2)
    logger.info(f"✅ Записано {len(index.equations)} уравнений, пропущено {len(index.skipped)}")
    return index
