"""
Simulation study of the adaptive estimators.

Errors are measured on the log scale: sigma(est, truth) = sqrt(mean log^2(est / truth))
over replications (RelMSE) for quantiles, and the root mean squared error against the
index of regular variation for the tail index. Replication results are reduced in
replication order so a report does not depend on the number of workers.
"""
import hashlib
import json
import logging
import math
from datetime import datetime, timezone
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from src import __version__
from src.models.laws import Law
from src.models.schemas import AdaptiveConfig, ExperimentReport, Table
from src.services.adaptive import resolve_k0, select
from src.services.distributions import sample
from src.services.errors import ArgumentError, NumericError, TailDomainError, TailFitError
from src.services.montecarlo import iter_reps, rep_rng
from src.services.quantiles import quantile_adaptive, quantile_curve, quantile_fixed_k
from src.services.storage import write_json, write_table
from src.services.tail_estimators import hill_curve


logger = logging.getLogger(__name__)

TABLE1_P = [0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999, 0.9999999, 0.99999999, 0.999999999, 0.9999999999]
TABLE2_K = [1, 2, 3, 4, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90]


def relmse(estimates: Sequence[float], truth: float) -> float:
    """
    sqrt(mean log^2(estimate / truth)); zero or non-finite estimates are excluded with a warning

    Args:
        estimates (Sequence[float]): Estimates
        truth (float): True value, > 0

    Raises:
        ArgumentError: No usable estimate
        TailDomainError: truth <= 0

    Returns:
        float: Relative mean squared error on the log scale
    """
    if not truth > 0:
        raise TailDomainError(f"true value must be positive, got {truth}")
    est = np.asarray(estimates, dtype=float)
    if est.size == 0:
        raise ArgumentError("relmse needs at least one estimate")
    usable = np.isfinite(est) & (est > 0)
    excluded = int(est.size - usable.sum())
    if excluded:
        logger.warning("relmse: %d of %d estimates excluded (zero or non-finite)", excluded, est.size)
    if not usable.any():
        raise ArgumentError("relmse: every estimate was excluded")
    return float(np.sqrt(np.mean(np.log(est[usable] / truth) ** 2)))


def _log_errors(estimates: np.ndarray, truth) -> np.ndarray:
    """log(estimate / truth), NaN where the estimate is unusable"""
    est = np.asarray(estimates, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(est / truth)
    return np.where(np.isfinite(est) & (est > 0), out, np.nan)


class _Accumulator:
    """Running sums of squared errors with per-cell exclusion counts"""

    def __init__(self, shape):
        self.sq = np.zeros(shape)
        self.count = np.zeros(shape, dtype=int)
        self.excluded = np.zeros(shape, dtype=int)

    def add(self, errors: np.ndarray) -> None:
        ok = np.isfinite(errors)
        self.sq += np.where(ok, errors, 0.0) ** 2
        self.count += ok
        self.excluded += ~ok

    def sigma(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.sqrt(np.where(self.count > 0, self.sq / np.maximum(self.count, 1), np.nan))


def _true_quantiles(law: Law, levels: Sequence[float], errors: Dict[str, str]) -> tuple[list, list, dict]:
    kept, truths, residuals = [], [], {}
    for p in levels:
        try:
            q = float(law.quantile(p))
            if not (math.isfinite(q) and q > 0):
                raise NumericError(f"true quantile at p={p} is {q}")
        except TailFitError as err:
            errors[f"p={p:g}"] = str(err)
            logger.warning("skipping p=%g: %s", p, err)
            continue
        kept.append(p)
        truths.append(q)
        residuals[f"{p:g}"] = abs(float(law.sf(q)) - (1.0 - p)) / (1.0 - p)
    return kept, truths, residuals


def _k_grid(n: int, k_stride: int, k_min: int) -> np.ndarray:
    ks = np.arange(k_min, n, k_stride)
    if ks.size == 0:
        raise ArgumentError(f"empty k grid for n={n}")
    return ks


def _quantile_rep(rep: int, law: Law, n: int, config: AdaptiveConfig, seed: int,
                  levels: Sequence[float], truths: Sequence[float], ks: np.ndarray):
    data = sample(law, n, rep_rng(seed, rep))
    selection = select(data, config)
    adaptive = np.empty(len(levels))
    fixed = np.empty((len(levels), ks.size))
    for j, (p, q) in enumerate(zip(levels, truths)):
        q_ad = quantile_adaptive(data, selection, p)
        if selection.k_hat >= 2 and q_ad != quantile_fixed_k(data, selection.k_hat, p):
            raise NumericError(f"adaptive and fixed-k estimates disagree at k={selection.k_hat}, p={p}")
        adaptive[j] = _log_errors(q_ad, q)
        fixed[j] = _log_errors(quantile_curve(data, ks, p), q)
    return adaptive, fixed


def _sample_quantile_rep(rep: int, law: Law, n: int, config: AdaptiveConfig, seed: int,
                         k_grid: Sequence[int], truths: Sequence[float]):
    data = sample(law, n, rep_rng(seed, rep))
    selection = select(data, config)
    raw = np.array([data.order_statistic(k) for k in k_grid])
    adaptive = np.array([quantile_adaptive(data, selection, 1.0 - k / n) for k in k_grid])
    return _log_errors(raw, np.asarray(truths)), _log_errors(adaptive, np.asarray(truths))


def _gamma_rep(rep: int, law: Law, n: int, config: AdaptiveConfig, seed: int, gamma: float, ks: np.ndarray):
    data = sample(law, n, rep_rng(seed, rep))
    selection = select(data, config)
    return selection.theta_hat - gamma, hill_curve(data, ks) - gamma


def _report(experiment: str, law: Law, n: int, n_rep: int, config: AdaptiveConfig, seed: int,
            tables: Dict[str, Table], errors: Dict[str, str], warnings: List[str], extra: dict) -> ExperimentReport:
    if n_rep == 1:
        warnings.append("single replication: low-precision estimates")
    for message in warnings:
        logger.warning("%s/%s: %s", law.name, experiment, message)
    provenance = {"version": __version__, "created": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    provenance.update(extra)
    return ExperimentReport(experiment=experiment, law=law.spec(), n=n, n_rep=n_rep, config=config, seed=seed,
                            tables=tables, errors=errors, warnings=warnings, provenance=provenance)


def quantile_ratio_experiment(law: Law,
                              n: int,
                              n_rep: int,
                              p_grid: Sequence[float],
                              config: AdaptiveConfig,
                              seed: int,
                              k_stride: int = 1,
                              workers: Optional[int] = None,
                              quiet: bool = True) -> ExperimentReport:
    """
    RelMSE of the adaptive quantile against the best fixed-k Weissman estimator,
    r_{n,p} = sigma(q_adaptive) / min_k sigma(q_k), for every p of the grid

    Args:
        law (Law): Sampling law with computable true quantiles
        n (int): Sample size
        n_rep (int): Replications
        p_grid (Sequence[float]): Probability levels
        config (AdaptiveConfig): Procedure parameters
        seed (int): Experiment seed
        k_stride (int): Step of the fixed-k grid 2..n-1. Defaults to 1.
        workers (Optional[int]): Process count
        quiet (bool): Disable the progress bar

    Returns:
        ExperimentReport: Tables "ratio" (one row per p) and "curves" (sigma per k and p)
    """
    resolve_k0(n, config)
    errors: Dict[str, str] = {}
    levels, truths, residuals = _true_quantiles(law, p_grid, errors)
    ks = _k_grid(n, k_stride, 2)
    ad, fx = _Accumulator(len(levels)), _Accumulator((len(levels), ks.size))
    worker = partial(_quantile_rep, law=law, n=n, config=config, seed=seed, levels=levels, truths=truths, ks=ks)
    for adaptive, fixed in iter_reps(worker, n_rep, workers, desc=f"{law.name} quantiles", quiet=quiet):
        ad.add(adaptive)
        fx.add(fixed)

    sigma_ad, sigma_fx = ad.sigma(), fx.sigma()
    warnings: List[str] = []
    rows = []
    for j, (p, q) in enumerate(zip(levels, truths)):
        curve = sigma_fx[j]
        if not np.isfinite(sigma_ad[j]) or not np.isfinite(curve).any():
            errors[f"p={p:g}"] = "no usable replication"
            continue
        best = int(np.nanargmin(curve))
        if ad.excluded[j]:
            warnings.append(f"p={p:g}: {int(ad.excluded[j])} adaptive estimates excluded")
        rows.append([p, q, float(sigma_ad[j]), float(curve[best]), int(ks[best]),
                     float(sigma_ad[j] / curve[best]), int(ad.excluded[j])])
    ratio = Table(name="ratio", columns=["p", "q_true", "sigma_adaptive", "min_sigma_fixed", "argmin_k", "ratio",
                                         "excluded"], rows=rows)
    curves = Table(name="curves", columns=["k"] + [f"sigma_p{p:g}" for p in levels],
                   rows=[[int(k)] + [float(v) for v in sigma_fx[:, i]] for i, k in enumerate(ks)])
    return _report("table1", law, n, n_rep, config, seed, {"ratio": ratio, "curves": curves}, errors, warnings,
                   {"inversion_residuals": residuals, "k_stride": k_stride})


def sample_quantile_comparison(law: Law,
                               n: int,
                               n_rep: int,
                               k_grid: Sequence[int],
                               config: AdaptiveConfig,
                               seed: int,
                               workers: Optional[int] = None,
                               quiet: bool = True) -> ExperimentReport:
    """
    RelMSE of the raw order statistic X_{n,k} against the adaptive quantile at p = 1 - k/n:
    r0_{n,k} = sigma(X_{n,k}) / sigma(q_adaptive)

    Args:
        law (Law): Sampling law
        n (int): Sample size
        n_rep (int): Replications
        k_grid (Sequence[int]): Values of k in 1..n-1
        config (AdaptiveConfig): Procedure parameters
        seed (int): Experiment seed
        workers (Optional[int]): Process count
        quiet (bool): Disable the progress bar

    Returns:
        ExperimentReport: Table "ratio" with one row per k
    """
    if any(not 1 <= k < n for k in k_grid):
        raise ArgumentError(f"k grid must lie in 1..{n - 1}")
    resolve_k0(n, config)
    errors: Dict[str, str] = {}
    levels = [1.0 - k / n for k in k_grid]
    kept, truths, residuals = _true_quantiles(law, levels, errors)
    if len(kept) != len(levels):
        raise NumericError(f"true quantiles unavailable for some k: {sorted(errors)}")
    raw, ad = _Accumulator(len(k_grid)), _Accumulator(len(k_grid))
    worker = partial(_sample_quantile_rep, law=law, n=n, config=config, seed=seed, k_grid=list(k_grid), truths=truths)
    for raw_err, ad_err in iter_reps(worker, n_rep, workers, desc=f"{law.name} sample quantiles", quiet=quiet):
        raw.add(raw_err)
        ad.add(ad_err)

    sigma_raw, sigma_ad = raw.sigma(), ad.sigma()
    warnings: List[str] = []
    rows = []
    for j, k in enumerate(k_grid):
        if not (np.isfinite(sigma_raw[j]) and np.isfinite(sigma_ad[j]) and sigma_ad[j] > 0):
            errors[f"k={k}"] = "ratio undefined"
            continue
        excluded = int(raw.excluded[j] + ad.excluded[j])
        if excluded:
            warnings.append(f"k={k}: {excluded} estimates excluded")
        rows.append([k, levels[j], truths[j], float(sigma_raw[j]), float(sigma_ad[j]),
                     float(sigma_raw[j] / sigma_ad[j]), excluded])
    ratio = Table(name="ratio", columns=["k", "p", "q_true", "sigma_sample", "sigma_adaptive", "ratio", "excluded"],
                  rows=rows)
    return _report("table2", law, n, n_rep, config, seed, {"ratio": ratio}, errors, warnings,
                   {"inversion_residuals": residuals})


def gamma_rmse_experiment(law: Law,
                          gamma: float,
                          n: int,
                          n_rep: int,
                          config: AdaptiveConfig,
                          seed: int,
                          k_stride: int = 1,
                          workers: Optional[int] = None,
                          quiet: bool = True) -> ExperimentReport:
    """
    Root mean squared error of the adaptive index theta_hat and of every Hill estimator
    against the index of regular variation gamma; r = sigma(theta_hat) / min_k sigma(h_k).
    The median of |theta_hat - gamma| is reported next to the RMSE.

    Args:
        law (Law): Sampling law
        gamma (float): Index of regular variation of the law
        n (int): Sample size
        n_rep (int): Replications
        config (AdaptiveConfig): Procedure parameters
        seed (int): Experiment seed
        k_stride (int): Step of the Hill grid 1..n-1. Defaults to 1.
        workers (Optional[int]): Process count
        quiet (bool): Disable the progress bar

    Returns:
        ExperimentReport: Tables "rmse" (one row) and "curves" (sigma per k)
    """
    if not gamma > 0:
        raise TailDomainError(f"gamma must be positive, got {gamma}")
    resolve_k0(n, config)
    ks = _k_grid(n, k_stride, 1)
    ad, hl = _Accumulator(1), _Accumulator(ks.size)
    abs_errors = []
    worker = partial(_gamma_rep, law=law, n=n, config=config, seed=seed, gamma=gamma, ks=ks)
    for theta_err, hill_err in iter_reps(worker, n_rep, workers, desc=f"{law.name} tail index", quiet=quiet):
        ad.add(np.atleast_1d(theta_err))
        abs_errors.append(abs(theta_err))
        hl.add(hill_err)

    sigma_ad, curve = float(ad.sigma()[0]), hl.sigma()
    best = int(np.nanargmin(curve))
    rmse = Table(name="rmse", columns=["gamma", "sigma_adaptive", "min_sigma_hill", "argmin_k", "ratio",
                                       "median_abs_error"],
                 rows=[[gamma, sigma_ad, float(curve[best]), int(ks[best]), sigma_ad / float(curve[best]),
                        float(np.median(abs_errors))]])
    curves = Table(name="curves", columns=["k", "sigma_hill"], rows=[[int(k), float(v)] for k, v in zip(ks, curve)])
    return _report("gamma_rmse", law, n, n_rep, config, seed, {"rmse": rmse, "curves": curves}, {}, [],
                   {"k_stride": k_stride})


def config_digest(document: dict) -> str:
    """sha256 of a JSON document with sorted keys"""
    return hashlib.sha256(json.dumps(document, sort_keys=True, default=str).encode("utf-8")).hexdigest()


def write_report(report: ExperimentReport, out_dir: Path) -> List[Path]:
    """
    Write each table as CSV and a JSON manifest; the first table is
    {law}_{n}_{experiment}.csv, the others get the table name as suffix

    Args:
        report (ExperimentReport): Experiment results
        out_dir (Path): Output directory

    Returns:
        List[Path]: Written files, manifest last
    """
    out_dir = Path(out_dir)
    stem = f"{report.law.name}_{report.n}_{report.experiment}"
    paths = []
    for i, (name, table) in enumerate(report.tables.items()):
        paths.append(write_table(table, out_dir / (f"{stem}.csv" if i == 0 else f"{stem}_{name}.csv")))
    manifest = report.model_dump(mode="json", exclude={"tables"})
    manifest["files"] = [p.name for p in paths]
    manifest["config_hash"] = config_digest({k: manifest[k] for k in ("experiment", "law", "n", "n_rep", "config",
                                                                       "seed")})
    paths.append(write_json(manifest, out_dir / f"{stem}.json"))
    logger.info("wrote %s", ", ".join(p.name for p in paths))
    return paths
