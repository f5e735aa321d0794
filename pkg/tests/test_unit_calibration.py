import logging

import pytest

from src.models.sample import Sample
from src.models.schemas import AdaptiveConfig
from src.services.adaptive import max_statistic
from src.services.calibration import calibrate, critical_value, load_calibration, null_statistic, save_calibration
from src.services.errors import ArgumentError, ConfigurationError
from src.services.montecarlo import rep_rng


def test_critical_value():
    ecdf = [float(v) for v in range(1, 11)]
    assert critical_value(ecdf, 0.9) == 9.0
    assert critical_value(ecdf, 0.95) == 10.0
    assert critical_value(ecdf, 0.05) == 1.0
    with pytest.raises(ArgumentError):
        critical_value(ecdf, 1.0)


def test_null_statistic_independent_of_index():
    config = AdaptiveConfig()
    assert null_statistic(3, 200, config, seed=5, theta=1.0) == pytest.approx(
        null_statistic(3, 200, config, seed=5, theta=2.5), rel=1e-8)


def test_calibrate(caplog):
    with caplog.at_level(logging.WARNING, logger="src.services.calibration"):
        result = calibrate(200, AdaptiveConfig(), n_rep=20, level=0.9, seed=1, workers=1)
    assert "low-precision calibration" in caplog.text
    assert result.n == 200 and result.n_rep == 20 and result.level == 0.9
    assert len(result.ecdf) == 20
    assert result.ecdf == sorted(result.ecdf)
    assert result.z == result.ecdf[17]
    assert result.config.critical_value is None
    assert result.config.mu is None


def test_calibrate_reproducible():
    a = calibrate(200, AdaptiveConfig(), n_rep=12, level=0.9, seed=3, workers=1)
    b = calibrate(200, AdaptiveConfig(), n_rep=12, level=0.9, seed=3, workers=2)
    assert a.ecdf == b.ecdf
    assert a.z == b.z


def test_calibrate_statistic_matches_direct_computation():
    config = AdaptiveConfig()
    result = calibrate(200, config, n_rep=5, level=0.5, seed=9, workers=1)
    direct = sorted(null_statistic(rep, 200, config, seed=9) for rep in range(5))
    assert result.ecdf == direct


def test_calibrate_arguments():
    with pytest.raises(ArgumentError):
        calibrate(200, AdaptiveConfig(), n_rep=0, level=0.9, seed=1, workers=1)
    with pytest.raises(ArgumentError):
        calibrate(200, AdaptiveConfig(), n_rep=10, level=1.5, seed=1, workers=1)
    with pytest.raises(ConfigurationError):
        calibrate(100, AdaptiveConfig(), n_rep=10, level=0.9, seed=1, workers=1)


def test_save_and_load(tmp_path):
    result = calibrate(200, AdaptiveConfig(), n_rep=5, level=0.8, seed=2, workers=1)
    path = save_calibration(result, tmp_path / "calibration.json")
    loaded = load_calibration(path)
    assert loaded.z == result.z
    assert loaded.ecdf is None
    assert loaded.config == result.config
    path = save_calibration(result, tmp_path / "full.json", include_ecdf=True)
    assert load_calibration(path).ecdf == result.ecdf


def test_load_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_calibration(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_calibration(bad)


def test_max_statistic_on_null_sample_is_moderate():
    # under the Pareto null the statistic stays of the order of log n
    data = Sample(1.0 / (1.0 - rep_rng(4, 0).random(1000)))
    assert 0.0 < max_statistic(data, AdaptiveConfig()) < 40.0
