# /numerics/grid_io.py
"""
Бинарный формат траекторий PDEGRID1.

    b"PDEGRID1" | uint32 LE длина заголовка | JSON-заголовок UTF-8 | nt*nx float64 LE

Заголовок: {"nt": ..., "nx": ..., "t": [...], "x0": ..., "dx": ...}.
"""
import json
import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from core.errors import ConfigError, GridFormatError, ShapeMismatch
from numerics.solver import Grid1D, SpaceTimeField

logger = logging.getLogger("symfilter_data")

MAGIC = b"PDEGRID1"
_LENGTH = struct.Struct("<I")


def encode_grid(traj: SpaceTimeField) -> bytes:
    header = {
        "nt": int(traj.nt),
        "nx": int(traj.grid.nx),
        "t": [float(t) for t in traj.times],
        "x0": float(traj.grid.x0),
        "dx": float(traj.grid.dx),
    }
    header_bytes = json.dumps(header, separators=(",", ":")).encode("utf-8")
    body = np.ascontiguousarray(traj.values, dtype="<f8").tobytes()
    return MAGIC + _LENGTH.pack(len(header_bytes)) + header_bytes + body


def decode_grid(data: bytes) -> SpaceTimeField:
    """
    Разбирает содержимое файла PDEGRID1.

    Raises:
        GridFormatError: неверная сигнатура, заголовок или размер данных
    """
    if not data.startswith(MAGIC):
        raise GridFormatError("Файл не начинается с сигнатуры PDEGRID1")
    offset = len(MAGIC)
    if len(data) < offset + _LENGTH.size:
        raise GridFormatError("Файл обрывается до длины заголовка")
    (header_len,) = _LENGTH.unpack_from(data, offset)
    offset += _LENGTH.size
    try:
        header = json.loads(data[offset:offset + header_len].decode("utf-8"))
        nt, nx = int(header["nt"]), int(header["nx"])
        times = np.asarray(header["t"], dtype=float)
        grid = Grid1D(nx=nx, dx=float(header["dx"]), x0=float(header["x0"]))
    except (ValueError, KeyError, TypeError, UnicodeDecodeError, ConfigError) as e:
        raise GridFormatError(f"Повреждённый заголовок PDEGRID1: {e}") from e
    offset += header_len
    if len(times) != nt:
        raise GridFormatError(f"В заголовке {len(times)} моментов времени, ожидалось {nt}")
    expected = nt * nx * 8
    if len(data) - offset != expected:
        raise GridFormatError(f"Размер данных {len(data) - offset} байт, ожидалось {expected}")
    values = np.frombuffer(data, dtype="<f8", count=nt * nx, offset=offset).reshape(nt, nx)
    try:
        return SpaceTimeField(grid, times, values.astype(float))
    except ShapeMismatch as e:
        raise GridFormatError(str(e)) from e


def write_grid(path: Union[str, Path], traj: SpaceTimeField) -> None:
    Path(path).write_bytes(encode_grid(traj))
    logger.debug(f"Записана траектория {path} ({traj.nt}x{traj.grid.nx})")


def read_grid(path: Union[str, Path]) -> SpaceTimeField:
    return decode_grid(Path(path).read_bytes())
