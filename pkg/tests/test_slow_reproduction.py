"""
Monte Carlo reproduction of the simulation study at full size, with acceptance bands
around the reference values. Run with ``pytest -m slow``.
"""
from functools import partial

import pytest

from src.models.laws import GPD, Hall, LogGamma, Pareto, PositiveCauchy
from src.models.schemas import AdaptiveConfig
from src.services.calibration import calibrate, null_statistic
from src.services.harness import gamma_rmse_experiment, quantile_ratio_experiment, sample_quantile_comparison
from src.services.montecarlo import run_reps


pytestmark = pytest.mark.slow

SEED = 20240318
N = 1000
N_REP = 2000

# adaptive / best fixed-k RelMSE ratio at p = 0.9, 0.99, 0.999, 0.9999
QUANTILE_RATIOS = {
    "cauchy": (PositiveCauchy(), [1.017966, 1.023952, 1.041944, 1.049905]),
    "loggamma": (LogGamma(shape=2.0, rate=1.0), [1.042706, 1.002527, 1.002542, 1.013393]),
    "hall": (Hall(), [0.996002, 1.009698, 1.023196, 1.030144]),
    "gpd": (GPD(shape=1.0, scale=1.0), [1.094321, 0.998349, 0.989391, 0.985767]),
}
QUANTILE_LEVELS = [0.9, 0.99, 0.999, 0.9999]

# sample quantile / adaptive RelMSE ratio at k = 1, 10, 50
SAMPLE_RATIOS = {
    "cauchy": (PositiveCauchy(), [3.5360, 1.4226, 1.1849]),
    "loggamma": (LogGamma(shape=2.0, rate=1.0), [2.7270, 1.3010, 1.1611]),
    "hall": (Hall(), [4.1240, 1.5772, 1.2183]),
    "gpd": (GPD(shape=1.0, scale=1.0), [1.3117, 1.6422, 1.1675]),
}
SAMPLE_K = [1, 10, 50]

# best Hill RMSE and adaptive / best ratio for the index
INDEX_RMSE = {
    "cauchy": (PositiveCauchy(), 0.07385, 1.06966),
    "loggamma": (LogGamma(shape=2.0, rate=1.0), 0.23112, 1.07321),
}


@pytest.mark.parametrize("n, low, high", [(1000, 8.5, 11.5), (500, 8.0, 12.0), (200, 8.0, 12.0)])
def test_calibrated_critical_value(n, low, high):
    result = calibrate(n, AdaptiveConfig(), n_rep=N_REP, level=0.99, seed=SEED, quiet=True)
    assert low <= result.z <= high


@pytest.mark.parametrize("name", sorted(QUANTILE_RATIOS))
def test_adaptive_quantile_close_to_best_fixed_k(name):
    law, expected = QUANTILE_RATIOS[name]
    report = quantile_ratio_experiment(law, n=N, n_rep=N_REP, p_grid=QUANTILE_LEVELS, config=AdaptiveConfig(),
                                       seed=SEED, quiet=True)
    table = report.tables["ratio"]
    assert table.column("p") == QUANTILE_LEVELS
    ratios = table.column("ratio")
    for ratio, reference in zip(ratios, expected):
        assert ratio == pytest.approx(reference, abs=0.05)
    assert max(ratios) <= 1.12


@pytest.mark.parametrize("name", sorted(SAMPLE_RATIOS))
def test_sample_quantile_against_adaptive(name):
    law, expected = SAMPLE_RATIOS[name]
    report = sample_quantile_comparison(law, n=N, n_rep=N_REP, k_grid=SAMPLE_K, config=AdaptiveConfig(),
                                        seed=SEED, quiet=True)
    table = report.tables["ratio"]
    assert table.column("k") == SAMPLE_K
    for ratio, reference in zip(table.column("ratio"), expected):
        assert ratio == pytest.approx(reference, rel=0.15)


@pytest.mark.parametrize("name", sorted(INDEX_RMSE))
def test_index_rmse(name):
    law, best, ratio = INDEX_RMSE[name]
    report = gamma_rmse_experiment(law, law.tail_index, n=N, n_rep=N_REP, config=AdaptiveConfig(), seed=SEED,
                                   quiet=True)
    table = report.tables["rmse"]
    assert table.column("min_sigma_hill")[0] == pytest.approx(best, rel=0.1)
    assert table.column("ratio")[0] == pytest.approx(ratio, abs=0.05)
    assert table.column("ratio")[0] <= 1.12


def test_index_consistent_on_pareto():
    report = gamma_rmse_experiment(Pareto(theta=1.0), 1.0, n=N, n_rep=500, config=AdaptiveConfig(), seed=SEED,
                                   k_stride=10, quiet=True)
    assert report.tables["rmse"].column("median_abs_error")[0] <= 0.1


def test_calibrated_level_holds_on_fresh_pareto_samples():
    config = AdaptiveConfig()
    z = calibrate(N, config, n_rep=N_REP, level=0.99, seed=SEED, quiet=True).z
    maxima = run_reps(partial(null_statistic, n=N, config=config, seed=SEED + 1), 1000, quiet=True)
    rejected = sum(t > z for t in maxima) / len(maxima)
    assert rejected <= 0.025
