# tests/test_grid_io.py
import json
import struct

import numpy as np
import pytest

from core.errors import GridFormatError
from numerics.grid_io import MAGIC, decode_grid, encode_grid, read_grid, write_grid
from numerics.solver import ConservationLaw, solve


@pytest.fixture
def traj(grid, smooth_u0):
    return solve(ConservationLaw("quadratic", 0.5, 0.05), smooth_u0, grid, 0.2, 5)


def test_file_round_trip(tmp_path, traj):
    path = tmp_path / "traj.grid"
    write_grid(path, traj)
    loaded = read_grid(path)
    np.testing.assert_array_equal(loaded.values, traj.values)
    np.testing.assert_array_equal(loaded.times, traj.times)
    assert loaded.grid == traj.grid


def test_layout(traj):
    data = encode_grid(traj)
    assert data.startswith(MAGIC)
    (length,) = struct.unpack_from("<I", data, len(MAGIC))
    header = json.loads(data[len(MAGIC) + 4:len(MAGIC) + 4 + length])
    assert header["nt"] == 5
    assert header["nx"] == 128
    assert header["dx"] == traj.grid.dx
    assert len(data) == len(MAGIC) + 4 + length + 5 * 128 * 8


def test_encoding_is_deterministic(traj):
    assert encode_grid(traj) == encode_grid(traj)


def test_bad_magic(traj):
    with pytest.raises(GridFormatError):
        decode_grid(b"NOTAGRID" + encode_grid(traj)[8:])


def test_truncated(traj):
    data = encode_grid(traj)
    with pytest.raises(GridFormatError):
        decode_grid(data[:-8])
    with pytest.raises(GridFormatError):
        decode_grid(MAGIC + b"\x01")


def test_corrupt_header(traj):
    header = b'{"nt": 5}'
    with pytest.raises(GridFormatError):
        decode_grid(MAGIC + struct.pack("<I", len(header)) + header)


def test_header_time_count_mismatch():
    header = json.dumps({"nt": 3, "nx": 8, "t": [0.0, 1.0], "x0": 0.0, "dx": 0.125}).encode()
    with pytest.raises(GridFormatError):
        decode_grid(MAGIC + struct.pack("<I", len(header)) + header + bytes(3 * 8 * 8))
