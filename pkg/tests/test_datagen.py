# tests/test_datagen.py
import json

import numpy as np
import pytest

from core.errors import ConfigError, NotSolvable
from modules.datagen import (
    FAMILY_NAMES, DatasetManifest, FamilySpec, equation_record, generate, read_equation_file, sample_ic,
    sample_params,
)
from numerics.grid_io import read_grid


def test_sample_params_range(rng):
    spec = FamilySpec.from_settings("burgers")
    for _ in range(100):
        q1, q2 = sample_params(spec, rng)
        assert 0.9 * spec.q1 <= q1 <= 1.1 * spec.q1
        assert 0.9 * spec.q2 <= q2 <= 1.1 * spec.q2


def test_inviscid_params_keep_zero_viscosity(rng):
    _, q2 = sample_params(FamilySpec.from_settings("icl_sine"), rng)
    assert q2 == 0.0


def test_sample_ic_is_normalized(rng, small_spec):
    u0 = sample_ic(small_spec, rng)
    assert u0.shape == (32,)
    assert np.max(np.abs(u0)) == pytest.approx(1.0)


@pytest.mark.parametrize("kwargs", [
    {"name": "kdv", "flux": "quadratic", "q1": 1.0},
    {"name": "icl_cubic", "flux": "cubic", "q1": 0.33, "q2": 0.05},
    {"name": "burgers", "flux": "quadratic", "q1": 0.5, "nx": 4},
    {"name": "burgers", "flux": "quadratic", "q1": 0.5, "t_f": 0.0},
])
def test_family_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        FamilySpec(**kwargs)


def test_manifest_validation(small_spec):
    with pytest.raises(ConfigError):
        DatasetManifest([], 1, 1)
    with pytest.raises(ConfigError):
        DatasetManifest([small_spec], 0, 1)
    with pytest.raises(ConfigError):
        DatasetManifest([small_spec], 1, 1, split="valid")


def test_desk_scale_counts():
    train = DatasetManifest.desk_scale("train")
    test = DatasetManifest.desk_scale("test", family_names=["burgers"])
    assert [spec.name for spec in train.families] == list(FAMILY_NAMES)
    assert (train.params_per_family, train.ics_per_param) == (64, 8)
    assert (test.params_per_family, test.ics_per_param, len(test.families)) == (16, 4, 1)


def test_equation_record_fields(small_spec):
    record = equation_record("x", small_spec, small_spec.law())
    assert record["input_window"] == [0, 4]
    assert record["label_window"] == [4, 8]
    assert record["coefficients"] == {"q1": 0.5, "q2": 0.0}
    assert record["canonical_tokens"][0] == "+"


def test_generate_small_dataset(dataset_dir, small_spec):
    manifest = DatasetManifest([small_spec], params_per_family=2, ics_per_param=2, seed=7)
    index = generate(manifest, dataset_dir, threads=1)

    assert index.skipped == []
    assert index.equations == [
        "train_inviscid_burgers_000_000", "train_inviscid_burgers_000_001",
        "train_inviscid_burgers_001_000", "train_inviscid_burgers_001_001",
    ]
    assert len(list(dataset_dir.glob("traj_*.grid"))) == 4
    assert len(list(dataset_dir.glob("eq_*.json"))) == 4

    traj = read_grid(dataset_dir / "traj_train_inviscid_burgers_000_000.grid")
    assert (traj.nt, traj.grid.nx) == (8, 32)
    assert traj.times[-1] == pytest.approx(0.2)
    assert np.max(np.abs(traj.initial)) == pytest.approx(1.0)

    record = json.loads((dataset_dir / "eq_train_inviscid_burgers_000_000.json").read_text(encoding="utf-8"))
    assert record["family"] == "inviscid_burgers"
    assert 0.45 <= record["coefficients"]["q1"] <= 0.55

    manifest_json = json.loads((dataset_dir / "manifest.json").read_text(encoding="utf-8"))
    assert manifest_json["equations"] == index.equations
    assert manifest_json["seed"] == 7


def test_generate_independent_of_threads(tmp_path, small_spec):
    manifest = DatasetManifest([small_spec], params_per_family=3, ics_per_param=2, seed=1)
    one, three = tmp_path / "one", tmp_path / "three"
    generate(manifest, one, threads=1)
    generate(manifest, three, threads=3)
    names = sorted(path.name for path in one.iterdir())
    assert names == sorted(path.name for path in three.iterdir())
    for name in names:
        assert (one / name).read_bytes() == (three / name).read_bytes()


def test_test_split_changes_data(tmp_path, small_spec):
    generate(DatasetManifest([small_spec], 1, 1, seed=1, split="train"), tmp_path / "a")
    generate(DatasetManifest([small_spec], 1, 1, seed=1, split="test"), tmp_path / "b")
    a = read_grid(tmp_path / "a" / "traj_train_inviscid_burgers_000_000.grid")
    b = read_grid(tmp_path / "b" / "traj_test_inviscid_burgers_000_000.grid")
    assert not np.array_equal(a.values, b.values)


def test_read_equation_file(tmp_path):
    by_family = tmp_path / "family.json"
    by_family.write_text(json.dumps({"family": "burgers", "coefficients": {"q1": 0.52, "q2": 0.04}}))
    _, law, _ = read_equation_file(by_family)
    assert (law.flux_kind, law.q1, law.q2) == ("quadratic", 0.52, 0.04)

    by_infix = tmp_path / "infix.json"
    by_infix.write_text(json.dumps({"infix": "u_t + cos(u)*u_x = 0"}))
    _, law, _ = read_equation_file(by_infix)
    assert (law.flux_kind, law.q1, law.q2) == ("sine", 1.0, 0.0)

    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    with pytest.raises(NotSolvable):
        read_equation_file(empty)
