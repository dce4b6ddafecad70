# tests/test_settings.py
import json

import pytest

from core import settings_manager
from modules.datagen import FamilySpec


@pytest.fixture
def settings_file(tmp_path, monkeypatch):
    path = tmp_path / "settings.json"
    monkeypatch.setattr(settings_manager, "SETTINGS_FILE", str(path))
    return path


def test_defaults_without_file(settings_file):
    assert settings_manager.get_setting("families.burgers.q1") == 0.5
    assert settings_manager.get_setting("metrics.n_polys") == 10
    assert settings_manager.get_setting("families.kdv") is None


def test_partial_file_is_merged(settings_file):
    settings_file.write_text(json.dumps({"families": {"burgers": {"q2": 0.1}}}))
    assert settings_manager.get_setting("families.burgers.q2") == 0.1
    assert settings_manager.get_setting("families.burgers.q1") == 0.5
    assert FamilySpec.from_settings("burgers").q2 == 0.1


def test_broken_file_falls_back(settings_file):
    settings_file.write_text("{not json")
    assert settings_manager.get_setting("perturb.swap_prob") == 0.5


def test_update_setting(settings_file):
    assert settings_manager.update_setting("perturb.noise_prob", 0.25)
    assert json.loads(settings_file.read_text())["perturb"]["noise_prob"] == 0.25
    assert settings_manager.get_setting("perturb.noise_prob") == 0.25
    assert not settings_manager.update_setting("perturb.missing", 1)
    assert not settings_manager.update_setting("perturb.swap_prob.deeper", 1)
