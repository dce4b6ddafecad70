# settings_manager.py
import copy
import json
import logging
from pathlib import Path
from typing import Dict, Any, Optional

from core.config import SETTINGS_FILE

logger = logging.getLogger("symfilter_data")

# --- Структура настроек по умолчанию ---
# Если файл настроек отсутствует или повреждён, используются эти значения.
# Базовые коэффициенты подобраны так, чтобы на [0,1]x[0,1] образовывались ударные волны.
DEFAULT_SETTINGS = {
    "families": {
        "burgers": {"flux": "quadratic", "q1": 0.5, "q2": 0.05, "t_f": 1.0, "x_f": 1.0, "nx": 128, "nt": 32},
        "inviscid_burgers": {"flux": "quadratic", "q1": 0.5, "q2": 0.0, "t_f": 1.0, "x_f": 1.0, "nx": 128, "nt": 32},
        "cl_cubic": {"flux": "cubic", "q1": 0.33, "q2": 0.05, "t_f": 1.0, "x_f": 1.0, "nx": 128, "nt": 32},
        "icl_cubic": {"flux": "cubic", "q1": 0.33, "q2": 0.0, "t_f": 1.0, "x_f": 1.0, "nx": 128, "nt": 32},
        "cl_sine": {"flux": "sine", "q1": 1.0, "q2": 0.05, "t_f": 1.0, "x_f": 1.0, "nx": 128, "nt": 32},
        "icl_sine": {"flux": "sine", "q1": 1.0, "q2": 0.0, "t_f": 1.0, "x_f": 1.0, "nx": 128, "nt": 32},
    },
    "perturb": {
        # Библиотека ошибочных слагаемых в инфиксной записи
        "noise_terms": ["u", "u*u_x", "u_xx", "sin(u)"],
        "noise_coeff_range": [0.1, 1.0],
        "swap_prob": 0.5,
        "noise_prob": 0.5,
    },
    "metrics": {
        "n_polys": 10,
        "grid_points": 32,
        "surrogate_seed": 0,
    },
}


def _settings_path() -> Path:
    return Path(SETTINGS_FILE)


def _load_settings() -> Dict[str, Any]:
    """
    Загружает настройки из JSON-файла.
    Если файла нет или он повреждён, возвращает копию настроек по умолчанию.
    """
    path = _settings_path()
    if not path.exists():
        logger.debug(f"Файл настроек {path} не найден, используются значения по умолчанию")
        return copy.deepcopy(DEFAULT_SETTINGS)

    with open(path, 'r', encoding='utf-8') as f:
        try:
            loaded = json.load(f)
        except json.JSONDecodeError:
            logger.error(f"Ошибка чтения {path}. Возвращаю настройки по умолчанию.")
            return copy.deepcopy(DEFAULT_SETTINGS)

    # Недостающие ключи берём из настроек по умолчанию
    merged = copy.deepcopy(DEFAULT_SETTINGS)
    _deep_update(merged, loaded)
    return merged


def _deep_update(target: Dict[str, Any], source: Dict[str, Any]) -> None:
    for key, value in source.items():
        if isinstance(value, dict) and isinstance(target.get(key), dict):
            _deep_update(target[key], value)
        else:
            target[key] = value


def _save_settings(settings: Dict[str, Any]):
    """Сохраняет переданный словарь настроек в JSON-файл."""
    with open(_settings_path(), 'w', encoding='utf-8') as f:
        json.dump(settings, f, ensure_ascii=False, indent=4)


def get_all_settings() -> Dict[str, Any]:
    """Возвращает все текущие настройки."""
    return _load_settings()


def update_setting(path: str, value: Any) -> bool:
    """
    Обновляет одну настройку по пути через точку, например "families.burgers.q1",
    и сохраняет файл настроек.
    """
    try:
        settings = _load_settings()
        keys = path.split('.')
        current_level = settings
        for key in keys[:-1]:
            current_level = current_level[key]
        if keys[-1] not in current_level:
            raise KeyError(keys[-1])
        current_level[keys[-1]] = value
        _save_settings(settings)
        logger.info(f"Настройка '{path}' обновлена на значение: {value}")
        return True
    except (KeyError, TypeError):
        logger.error(f"Неверный путь к настройке: {path}")
        return False
    except OSError as e:
        logger.error(f"Не удалось сохранить настройку '{path}': {e}")
        return False


def get_setting(path: str) -> Optional[Any]:
    """
    Получает значение одной настройки по пути.
    Пример: get_setting("families.icl_sine.q1")
    """
    try:
        value = _load_settings()
        for key in path.split('.'):
            value = value[key]
        return value
    except (KeyError, TypeError):
        logger.warning(f"Настройка по пути '{path}' не найдена. Возвращено None.")
        return None
