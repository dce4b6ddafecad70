# tests/test_study.py
import pandas as pd
import pytest

from core.errors import ConfigError
from modules.datagen import TABLE_FAMILIES
from modules.study import StudyConfig, curves_table, run_study, summary_table, trials_table
from numerics.particle_filter import FilterConfig
from texts import STUDY_COLUMNS


def small_config(threads: int = 1) -> StudyConfig:
    return StudyConfig(
        families=("inviscid_burgers",),
        trials=2,
        seed=3,
        filter=FilterConfig(particles=50, steps=3),
        threads=threads,
    )


@pytest.fixture(scope="module")
def small_results():
    return run_study(small_config())


@pytest.mark.parametrize("kwargs", [{"trials": 0}, {"coeff_error": 1.0}, {"coeff_error": -0.1}, {"families": ()}])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        StudyConfig(**kwargs)


def test_trial_results(small_results):
    assert [(r.family, r.trial) for r in small_results] == [("inviscid_burgers", 0), ("inviscid_burgers", 1)]
    for r in small_results:
        assert len(r.true_coefficients) == 1
        assert abs(r.initial_coefficients[0] / r.true_coefficients[0] - 1) == pytest.approx(0.03)
        assert len(r.ess_per_step) == 3
        assert r.symbolic_without > 0
        assert r.series_without > 0


def test_summary_table(small_results):
    table = summary_table(small_results)
    assert list(table.columns) == list(STUDY_COLUMNS)
    assert len(table) == 1
    row = table.iloc[0]
    assert row["type"] == "Inviscid Burgers'"
    assert row["trials"] == 2
    mean = sum(r.symbolic_with for r in small_results) / 2
    assert row["symbolic_with"] == pytest.approx(100 * mean)


def test_curves_and_trials_tables(small_results):
    curves = curves_table(small_results)
    assert list(curves.columns) == ["family", "trial", "step", "ess", "spread_1"]
    assert len(curves) == 6
    assert curves["step"].tolist() == [1, 2, 3, 1, 2, 3]
    assert len(trials_table(small_results)) == 2


def test_independent_of_threads(small_results):
    threaded = run_study(small_config(threads=2))
    pd.testing.assert_frame_equal(summary_table(small_results), summary_table(threaded))
    pd.testing.assert_frame_equal(curves_table(small_results), curves_table(threaded))


@pytest.mark.slow
def test_filter_reduces_errors():
    """20 испытаний на семейство: с фильтром обе ошибки в среднем меньше, чем без него."""
    table = summary_table(run_study(StudyConfig(families=TABLE_FAMILIES, trials=20, coeff_error=0.03)))
    for row in table.itertuples():
        assert row.symbolic_with < row.symbolic_without, row.family
        assert row.series_with < row.series_without, row.family
