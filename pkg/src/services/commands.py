"""
Run a resolved RunConfig: the estimate, calibrate, simulate and analyze commands.

Each command writes its artifacts under config.output_dir and returns their paths.
"""
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.models.laws import Law
from src.models.sample import Sample
from src.models.schemas import AdaptiveConfig, EstimateResult, RunConfig, Table
from src.services.adaptive import select
from src.services.calibration import calibrate, load_calibration, save_calibration
from src.services.distributions import build_law, fit_diagnostics, sample, theta_fit, theta_fit_empirical
from src.services.errors import ConfigurationError, TailFitError
from src.services.harness import (TABLE1_P, gamma_rmse_experiment, quantile_ratio_experiment,
                                  sample_quantile_comparison, write_report)
from src.services.montecarlo import rep_rng
from src.services.quantiles import quantile_adaptive
from src.services.storage import read_observations, write_frame, write_json, write_table
from src.services.tail_estimators import hill_curve


logger = logging.getLogger(__name__)

ESTIMATE_P = [0.99, 0.999, 0.9999]


def estimate(data: Sample,
             adaptive: AdaptiveConfig,
             p_levels: Optional[Sequence[float]] = None,
             full_trace: bool = False) -> EstimateResult:
    """
    Adaptive tail selection and quantile estimates on one sample

    Args:
        data (Sample): Observations
        adaptive (AdaptiveConfig): Procedure parameters
        p_levels (Optional[Sequence[float]]): Quantile levels. Defaults to ESTIMATE_P.
        full_trace (bool): Trace the whole grid. Defaults to False.

    Returns:
        EstimateResult: Selection and quantiles keyed by level
    """
    selection = select(data, adaptive, full_trace=full_trace)
    levels = ESTIMATE_P if p_levels is None else p_levels
    quantiles = {f"{p:g}": quantile_adaptive(data, selection, p) for p in levels}
    return EstimateResult(**selection.model_dump(exclude={"trace"}), quantiles=quantiles, trace=selection.trace)


def resolve_adaptive(config: RunConfig, n: int) -> AdaptiveConfig:
    """
    Procedure parameters with the critical value taken from the calibration file, if any
    """
    if config.calibration_file is None:
        return config.adaptive
    calibration = load_calibration(config.calibration_file)
    if calibration.n != n:
        logger.warning("calibration was computed for n=%d, data has n=%d", calibration.n, n)
    return config.adaptive.model_copy(update={"critical_value": calibration.z, "mu": None})


def cmd_estimate(config: RunConfig) -> List[Path]:
    """
    Writes estimate.json, hill.csv (k, h_{n,k}), trace.csv (r_i, T_{n,r_i}) and quantiles.csv
    """
    data = Sample(read_observations(config.input_path))
    adaptive = resolve_adaptive(config, data.n)
    result = estimate(data, adaptive, config.p_levels, full_trace=config.trace == "full")
    out = Path(config.output_dir)
    ks = np.arange(1, data.n)
    hill = Table(name="hill", columns=["k", "hill"], rows=[[int(k), float(h)] for k, h in zip(ks, hill_curve(data, ks))])
    trace = Table(name="trace", columns=["r", "t_stat"], rows=[[r, t] for r, t in result.trace])
    quantiles = Table(name="quantiles", columns=["p", "q"], rows=[[float(p), q] for p, q in result.quantiles.items()])
    logger.info("n=%d rejected=%s k_hat=%d theta_hat=%.6g", result.n, result.rejected, result.k_hat, result.theta_hat)
    return [write_json(result, out / "estimate.json"),
            write_table(hill, out / "hill.csv"),
            write_table(trace, out / "trace.csv"),
            write_table(quantiles, out / "quantiles.csv")]


def cmd_calibrate(config: RunConfig) -> List[Path]:
    """
    Writes calibration.json, calibration.csv (one summary row) and, on request,
    calibration_ecdf.csv
    """
    result = calibrate(config.n, config.adaptive, config.n_rep, config.level, config.seed,
                       workers=config.workers, quiet=config.quiet)
    out = Path(config.output_dir)
    summary = Table(name="calibration", columns=["n", "n_rep", "level", "z"],
                    rows=[[result.n, result.n_rep, result.level, result.z]])
    paths = [save_calibration(result, out / "calibration.json", include_ecdf=config.include_ecdf),
             write_table(summary, out / "calibration.csv")]
    if config.include_ecdf:
        ecdf = Table(name="ecdf", columns=["rank", "t_max"], rows=[[i + 1, v] for i, v in enumerate(result.ecdf)])
        paths.append(write_table(ecdf, out / "calibration_ecdf.csv"))
    return paths


def cmd_simulate(config: RunConfig) -> List[Path]:
    """
    Dispatches to the simulation-study experiments and writes the report
    """
    law = build_law(config.law_spec)
    common = dict(n=config.n, n_rep=config.n_rep, config=config.adaptive, seed=config.seed,
                  workers=config.workers, quiet=config.quiet)
    if config.experiment == "table1":
        report = quantile_ratio_experiment(law, p_grid=config.p_levels or TABLE1_P, k_stride=config.k_stride, **common)
    elif config.experiment == "table2":
        report = sample_quantile_comparison(law, k_grid=config.k_grid, **common)
    elif config.experiment == "gamma_rmse":
        gamma = law.tail_index if config.gamma is None else config.gamma
        report = gamma_rmse_experiment(law, gamma, k_stride=config.k_stride, **common)
    else:
        raise ConfigurationError(f"unknown experiment '{config.experiment}'")
    return write_report(report, config.output_dir)


def hill_overlay(law: Law, data: Sample, k_stride: int = 1) -> Table:
    """
    Hill estimates next to the law's fitted index at the same thresholds: for each k,
    t = X_{n,k}, h_{n,k}, the empirical mean of alpha_F over the top k observations and
    theta_t(F). A theta_t(F) that cannot be computed is left empty.

    Args:
        law (Law): Law the sample was drawn from
        data (Sample): Observations, n >= 2
        k_stride (int): Step of k over 1..n-1. Defaults to 1.

    Returns:
        Table: Columns k, t, hill, theta_fit_empirical, theta_fit
    """
    ks = np.arange(1, data.n, k_stride)
    hills = hill_curve(data, ks)
    rows = []
    failed = 0
    for k, h in zip(ks, hills):
        t = data.order_statistic(int(k))
        try:
            fitted = theta_fit(law, t)
        except TailFitError:
            fitted = np.nan
            failed += 1
        rows.append([int(k), t, float(h), theta_fit_empirical(data, int(k), law), fitted])
    if failed:
        logger.warning("theta_t(F) unavailable at %d of %d thresholds of the %s overlay", failed, ks.size, law.name)
    return Table(name="hill_overlay", columns=["k", "t", "hill", "theta_fit_empirical", "theta_fit"], rows=rows)


def cmd_analyze(config: RunConfig) -> List[Path]:
    """
    Writes {law}_analyze.csv with theta_t(F), alpha_F(t) and chi^2(F_t, P_{theta_t})
    on a log-spaced threshold grid, and {law}_hill_overlay.csv for a sample of size n
    drawn with the run seed
    """
    law = build_law(config.law_spec)
    t_min = config.t_min or 2.0 * max(law.support_left, 1.0)
    t_max = config.t_max or 1e4 * t_min
    if not t_max > t_min:
        raise ConfigurationError(f"t_max={t_max} must exceed t_min={t_min}")
    rows = [fit_diagnostics(law, float(t)) for t in np.geomspace(t_min, t_max, config.points)]
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=["t", "theta_fit", "alpha", "chi2", "error"])
    out = Path(config.output_dir)
    overlay = hill_overlay(law, sample(law, config.n, rep_rng(config.seed, 0)), config.k_stride)
    return [write_frame(frame, out / f"{law.name}_analyze.csv"),
            write_table(overlay, out / f"{law.name}_hill_overlay.csv")]


COMMANDS: Dict[str, Callable[[RunConfig], List[Path]]] = {
    "estimate": cmd_estimate,
    "calibrate": cmd_calibrate,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
}


def run(config: RunConfig) -> List[Path]:
    """
    Execute the configured command

    Returns:
        List[Path]: Written artifacts
    """
    logger.debug("running %s with %s", config.command, config.model_dump_json())
    return COMMANDS[config.command](config)
