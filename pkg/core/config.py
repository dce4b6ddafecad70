import os
import logging
from dotenv import load_dotenv

# Загружаем переменные из .env файла
load_dotenv()

logger = logging.getLogger("symfilter_cli")


# Вспомогательные функции для чтения чисел из окружения
def _env_int(name: str, default: int) -> int:
    """Читает целое из переменной окружения, при ошибке возвращает значение по умолчанию."""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.strip())
    except ValueError:
        logger.warning(f"⚠️  {name}={raw!r} не является целым числом, используется {default}")
        return default


def _env_float(name: str, default: float) -> float:
    """Читает вещественное число из переменной окружения."""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return float(raw.strip())
    except ValueError:
        logger.warning(f"⚠️  {name}={raw!r} не является числом, используется {default}")
        return default


# --- Логирование ---
LOG_LEVEL = os.getenv("SYMFILTER_LOG_LEVEL", "INFO").upper()
LOG_FILE = os.getenv("SYMFILTER_LOG_FILE", "logs/symfilter.log")

# --- Параллелизм ---
# Число потоков по умолчанию для генерации датасета и исследования
DEFAULT_THREADS = max(1, _env_int("SYMFILTER_THREADS", 1))

# --- Фильтр частиц ---
FILTER_PARTICLES = _env_int("SYMFILTER_PARTICLES", 500)
FILTER_STEPS = _env_int("SYMFILTER_STEPS", 10)
FILTER_PROCESS_VAR = _env_float("SYMFILTER_PROCESS_VAR", 1e-5)
FILTER_OBS_SCALE = _env_float("SYMFILTER_OBS_SCALE", 0.05)
FILTER_INIT_HALFWIDTH = _env_float("SYMFILTER_INIT_HALFWIDTH", 0.1)
FILTER_LIKELIHOOD = os.getenv("SYMFILTER_LIKELIHOOD", "pointwise").strip().lower()

# --- Решатель ---
SOLVER_CFL = _env_float("SYMFILTER_CFL", 0.4)
SOLVER_DT_MAX = _env_float("SYMFILTER_DT_MAX", 0.01)

# --- Файл настроек семейств уравнений ---
SETTINGS_FILE = os.getenv("SYMFILTER_SETTINGS_FILE", "symfilter_settings.json")

if FILTER_LIKELIHOOD not in ("pointwise", "field"):
    logger.warning(f"⚠️  SYMFILTER_LIKELIHOOD={FILTER_LIKELIHOOD!r} не поддерживается, используется 'pointwise'")
    FILTER_LIKELIHOOD = "pointwise"
