"""
Extreme quantile estimators: fixed-k Weissman extrapolation and its adaptive plug-in
"""
import math
from typing import Sequence

import numpy as np
from pydantic import ValidationError

from src.models.sample import Sample
from src.models.schemas import QuantileRequest, TailSelection
from src.services.errors import ArgumentError
from src.services.tail_estimators import hill_curve

_ROUNDING = 1e-9


def _check_p(p: float) -> None:
    try:
        QuantileRequest(p=p)
    except ValidationError as err:
        raise ArgumentError(f"probability level must lie in (0, 1), got {p}") from err


def _sample_quantile(sample: Sample, p: float) -> float:
    idx = math.floor(sample.n * (1.0 - p) + _ROUNDING)
    return sample.order_statistic(min(max(idx, 1), sample.n))


def _weissman(sample: Sample, k: int, h: float, p: float) -> float:
    if p < 1.0 - k / sample.n:
        return _sample_quantile(sample, p)
    return sample.order_statistic(k) * (k / (sample.n * (1.0 - p))) ** h


def quantile_fixed_k(sample: Sample, k: int, p: float) -> float:
    """
    Weissman estimator with k upper order statistics:
    X_{n,[n(1-p)]} if p < 1 - k/n, else X_{n,k} (k / (n(1-p)))^{h_{n,k}}.
    At k = n the exponent is h_{n,n-1}.

    Args:
        sample (Sample): Observations
        k (int): 2 <= k <= n
        p (float): Probability level in (0, 1)

    Raises:
        ArgumentError: k or p out of range

    Returns:
        float: Quantile estimate
    """
    if not 2 <= k <= sample.n:
        raise ArgumentError(f"quantile estimator needs 2 <= k <= n = {sample.n}, got k={k}")
    _check_p(p)
    h = float(hill_curve(sample, [min(k, sample.n - 1)])[0])
    return _weissman(sample, k, h, p)


def quantile_adaptive(sample: Sample, selection: TailSelection, p: float) -> float:
    """
    Weissman estimator at the adaptive k_hat with exponent theta_hat

    Args:
        sample (Sample): Observations the selection was computed on
        selection (TailSelection): Output of the adaptive procedure
        p (float): Probability level in (0, 1)

    Raises:
        ArgumentError: Sample and selection sizes differ, or p out of range

    Returns:
        float: Quantile estimate
    """
    if selection.n != sample.n:
        raise ArgumentError(f"selection was computed on n={selection.n} observations, sample has {sample.n}")
    _check_p(p)
    return _weissman(sample, selection.k_hat, selection.theta_hat, p)


def quantile_curve(sample: Sample, ks: Sequence[int], p: float) -> np.ndarray:
    """
    Fixed-k estimates at one level for many k

    Args:
        sample (Sample): Observations
        ks (Sequence[int]): Values of k, each in 2..n
        p (float): Probability level in (0, 1)

    Returns:
        np.ndarray: Estimates in the order of ks
    """
    ks = np.asarray(ks, dtype=int)
    if ks.size and (ks.min() < 2 or ks.max() > sample.n):
        raise ArgumentError(f"quantile estimator needs 2 <= k <= n = {sample.n}")
    _check_p(p)
    h = hill_curve(sample, np.minimum(ks, sample.n - 1))
    base = sample.desc[ks - 1] * (ks / (sample.n * (1.0 - p))) ** h
    return np.where(p < 1.0 - ks / sample.n, _sample_quantile(sample, p), base)
