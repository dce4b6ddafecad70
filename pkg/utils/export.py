# /utils/export.py
"""
Запись результатов команд в JSON или CSV.

JSON пишется с отсортированными ключами и фиксированными отступами, CSV -
через pandas с фиксированным форматом чисел, так что повторный запуск с теми
же входами даёт побайтно тот же файл.
"""
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
import pandas as pd

from core.errors import UsageError

logger = logging.getLogger("symfilter_cli")

FORMATS = ("json", "csv")
FLOAT_FORMAT = "%.10g"


def _plain(value: Any) -> Any:
    """Приводит numpy-значения и кортежи к типам, которые понимает json."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def to_json_text(payload: Any) -> str:
    return json.dumps(_plain(payload), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def frame_to_records(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    return [_plain(row) for row in frame.to_dict(orient="records")]


def to_csv_text(payload: Union[pd.DataFrame, Mapping[str, Any], List[Mapping[str, Any]]],
                columns: Optional[Mapping[str, str]] = None) -> str:
    """
    CSV из таблицы, словаря или списка словарей.

    Вложенные словари разворачиваются в колонки через точку (pandas.json_normalize),
    списки пишутся как JSON-строка.

    Args:
        payload: Данные
        columns: Порядок колонок и их заголовки, как COLUMN_CONFIG в отчётах
    """
    if isinstance(payload, pd.DataFrame):
        frame = payload.copy()
    else:
        records = [payload] if isinstance(payload, Mapping) else list(payload)
        frame = pd.json_normalize(_plain(records), sep=".")
    for name in frame.columns:
        if frame[name].map(lambda v: isinstance(v, (list, tuple, np.ndarray))).any():
            frame[name] = frame[name].map(lambda v: json.dumps(_plain(v), ensure_ascii=False))
    if columns is not None:
        frame = frame[list(columns)].rename(columns=dict(columns))
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def render(payload: Any, fmt: str, columns: Optional[Mapping[str, str]] = None) -> str:
    if fmt not in FORMATS:
        raise UsageError(f"Неизвестный формат '{fmt}', допустимы: {', '.join(FORMATS)}")
    if fmt == "csv":
        return to_csv_text(payload, columns)
    if isinstance(payload, pd.DataFrame):
        payload = frame_to_records(payload)
    return to_json_text(payload)


def emit(payload: Any, fmt: str, output: Optional[Union[str, Path]] = None,
         columns: Optional[Mapping[str, str]] = None) -> None:
    """Печатает результат в stdout или записывает в файл output."""
    text = render(payload, fmt, columns)
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(output)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"✅ Результат записан в {path}")
