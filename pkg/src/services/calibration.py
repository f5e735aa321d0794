"""
Monte Carlo critical values of the adaptive procedure under the Pareto null.

The window statistics are invariant under X -> X^c, so the null law of
T_n = max_i T_{n,r_i} does not depend on the Pareto index; samples are drawn as
(1 - U)^(-theta) from uniform streams.
"""
import logging
import math
from functools import partial
from pathlib import Path
from typing import List

import numpy as np
from pydantic import ValidationError

from src.models.sample import Sample
from src.models.schemas import AdaptiveConfig, CalibrationResult
from src.services.adaptive import max_statistic, resolve_k0
from src.services.errors import ArgumentError, ConfigurationError
from src.services.montecarlo import rep_rng, run_reps


logger = logging.getLogger(__name__)

MIN_REPS = 100


def null_statistic(rep: int, n: int, config: AdaptiveConfig, seed: int, theta: float = 1.0) -> float:
    """
    T_n on the rep-th Pareto(theta) sample

    Args:
        rep (int): Replication index
        n (int): Sample size
        config (AdaptiveConfig): Procedure parameters
        seed (int): Experiment seed
        theta (float): Pareto index of the null sample. Defaults to 1.0.

    Returns:
        float: Maximum window statistic over the grid
    """
    u = rep_rng(seed, rep).random(n)
    return max_statistic(Sample((1.0 - u) ** (-theta)), config)


def critical_value(ecdf: List[float], level: float) -> float:
    """
    Order statistic ceil(level * n_rep) of the sorted simulated maxima

    Args:
        ecdf (List[float]): Sorted simulated maxima
        level (float): Confidence level in (0, 1)

    Returns:
        float: Critical value
    """
    if not 0 < level < 1:
        raise ArgumentError(f"level must lie in (0, 1), got {level}")
    idx = math.ceil(level * len(ecdf) - 1e-9)
    return float(ecdf[min(max(idx, 1), len(ecdf)) - 1])


def calibrate(n: int,
              config: AdaptiveConfig,
              n_rep: int,
              level: float,
              seed: int,
              workers: int | None = None,
              theta: float = 1.0,
              quiet: bool = True) -> CalibrationResult:
    """
    Empirical level-quantile of T_n over n_rep Pareto samples of size n

    Args:
        n (int): Sample size
        config (AdaptiveConfig): Procedure parameters; its critical value is ignored
        n_rep (int): Number of replications
        level (float): Confidence level in (0, 1)
        seed (int): Experiment seed
        workers (int | None): Process count. Defaults to settings.workers.
        theta (float): Pareto index of the null samples. Defaults to 1.0.
        quiet (bool): Disable the progress bar. Defaults to True.

    Raises:
        ConfigurationError: Infeasible grid for n
        ArgumentError: level outside (0, 1) or n_rep < 1

    Returns:
        CalibrationResult: z with the sorted simulated maxima
    """
    if n_rep < 1:
        raise ArgumentError(f"n_rep must be >= 1, got {n_rep}")
    if not 0 < level < 1:
        raise ArgumentError(f"level must lie in (0, 1), got {level}")
    resolve_k0(n, config)
    if n_rep < MIN_REPS:
        logger.warning("low-precision calibration: n_rep=%d < %d", n_rep, MIN_REPS)

    worker = partial(null_statistic, n=n, config=config, seed=seed, theta=theta)
    maxima = np.sort(np.asarray(run_reps(worker, n_rep, workers, desc="calibration", quiet=quiet)))
    ecdf = maxima.tolist()
    z = critical_value(ecdf, level)
    logger.info("calibrated z=%.6g at level %.4g (n=%d, n_rep=%d)", z, level, n, n_rep)
    return CalibrationResult(z=z, level=level, n=n, n_rep=n_rep, seed=seed, ecdf=ecdf,
                             config=config.model_copy(update={"critical_value": None, "mu": None}))


def save_calibration(result: CalibrationResult, path: Path, include_ecdf: bool = False) -> Path:
    """
    Write the calibration as JSON

    Args:
        result (CalibrationResult): Calibration
        path (Path): Target file
        include_ecdf (bool): Keep the simulated maxima. Defaults to False.

    Returns:
        Path: The written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    exclude = None if include_ecdf else {"ecdf"}
    path.write_text(result.model_dump_json(indent=2, exclude=exclude) + "\n")
    return path


def load_calibration(path: Path) -> CalibrationResult:
    """
    Read a calibration JSON document

    Raises:
        ConfigurationError: Missing or malformed file
    """
    path = Path(path)
    try:
        return CalibrationResult.model_validate_json(path.read_text())
    except OSError as err:
        raise ConfigurationError(f"cannot read calibration file {path}: {err.strerror}") from err
    except ValidationError as err:
        raise ConfigurationError(f"malformed calibration file {path}: {err.errors()[0]['msg']}") from err
