"""
Point estimators on the upper order statistics: Hill family, threshold-local and
band (change-point segment) Pareto indices, and local log-likelihood ratios.

Threshold comparisons are strict: n_t counts observations X_i > t.
"""
import math
from typing import Optional, Sequence

import numpy as np

from src.models.sample import Sample
from src.models.schemas import ExceedanceCounts
from src.services.errors import ArgumentError, TailDomainError


def log_excess_sums(sample: Sample, t):
    """
    Counts n_t and sums S_t = sum_{X_i > t} log(X_i / t), vectorized over t

    Args:
        sample (Sample): Observations
        t (float | np.ndarray): Positive thresholds

    Returns:
        tuple[np.ndarray, np.ndarray]: (n_t, S_t)
    """
    t = np.asarray(t, dtype=float)
    counts = sample.counts_above(t)
    sums = sample.top_log_sum(counts) - counts * np.log(t)
    # rounding can leave tiny negatives when the top values equal t up to ulp
    return counts, np.maximum(sums, 0.0)


def hill(sample: Sample, k: int) -> float:
    """
    Hill estimator (1/k) sum_{i<=k} log(X_{n,i} / X_{n,k+1})

    Args:
        sample (Sample): Observations
        k (int): Number of upper order statistics, 1 <= k <= n - 1

    Raises:
        ArgumentError: k out of range

    Returns:
        float: Estimate, >= 0
    """
    if not 1 <= k <= sample.n - 1:
        raise ArgumentError(f"Hill estimator needs 1 <= k <= n - 1 = {sample.n - 1}, got k={k}")
    return max(float(sample.top_log_sum(k) / k - sample.log_desc[k]), 0.0)


def hill_curve(sample: Sample, ks: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Hill estimates for several k at once

    Args:
        sample (Sample): Observations
        ks (Optional[Sequence[int]]): Values of k; 1..n-1 when omitted

    Raises:
        ArgumentError: Some k out of range

    Returns:
        np.ndarray: h_{n,k} for each requested k
    """
    ks = np.arange(1, sample.n) if ks is None else np.asarray(ks, dtype=int)
    if ks.size and (ks.min() < 1 or ks.max() > sample.n - 1):
        raise ArgumentError(f"Hill estimator needs 1 <= k <= n - 1 = {sample.n - 1}")
    return np.maximum(sample.top_log_sum(ks) / np.maximum(ks, 1) - sample.log_desc[ks], 0.0)


def count_exceed(sample: Sample, t: float) -> int:
    """Number of observations strictly above t"""
    return int(sample.counts_above(t))


def count_band(sample: Sample, t: float, tau: float) -> ExceedanceCounts:
    """
    Counts above t and inside (t, tau]

    Raises:
        ArgumentError: tau < t
    """
    if tau < t:
        raise ArgumentError(f"band needs t <= tau, got t={t}, tau={tau}")
    n_t = count_exceed(sample, t)
    return ExceedanceCounts(n_t=n_t, n_t_tau=n_t - count_exceed(sample, tau))


def theta_local(sample: Sample, t: float) -> float:
    """
    Local maximum quasi-likelihood index (1/n_t) sum_{X_i > t} log(X_i / t), 0 when n_t = 0

    Args:
        sample (Sample): Observations
        t (float): Threshold, > 0

    Raises:
        ArgumentError: t <= 0

    Returns:
        float: Estimate
    """
    if not t > 0:
        raise ArgumentError(f"threshold must be positive, got {t}")
    n_t, s_t = log_excess_sums(sample, t)
    return float(s_t / n_t) if n_t else 0.0


def theta_band(sample: Sample, t: float, tau: float) -> float:
    """
    Maximum likelihood index of the band (t, tau] in the change-point model:
    (n_t theta_t - n_tau theta_tau) / n_{t,tau}, 0 when the band is empty

    Args:
        sample (Sample): Observations
        t (float): Lower threshold, > 0
        tau (float): Change point, >= t

    Raises:
        ArgumentError: t <= 0 or tau < t

    Returns:
        float: Estimate
    """
    if not t > 0:
        raise ArgumentError(f"threshold must be positive, got {t}")
    if tau < t:
        raise ArgumentError(f"band needs t <= tau, got t={t}, tau={tau}")
    (n_t, n_tau), (s_t, s_tau) = log_excess_sums(sample, [t, tau])
    n_band = n_t - n_tau
    if n_band == 0:
        return 0.0
    return max(float((s_t - s_tau) / n_band), 0.0)


def _check_indices(*thetas: float) -> None:
    for theta in thetas:
        if not theta > 0:
            raise TailDomainError(f"Pareto index must be > 0, got {theta}")


def loglik_ratio(sample: Sample, t: float, theta_alt: float, theta_null: float) -> float:
    """
    Log local likelihood ratio of P_theta_alt against P_theta_null on the excesses over t:
    n_t [log(theta_null / theta_alt) + (1/theta_null - 1/theta_alt) theta_t]

    Raises:
        ArgumentError: t <= 0
        TailDomainError: Non-positive index
    """
    _check_indices(theta_alt, theta_null)
    theta_t = theta_local(sample, t)
    n_t = count_exceed(sample, t)
    return n_t * (math.log(theta_null / theta_alt) + (1.0 / theta_null - 1.0 / theta_alt) * theta_t)


def loglik_ratio_changepoint(sample: Sample,
                             t: float,
                             tau: float,
                             theta1: float,
                             theta2: float,
                             theta_null: float) -> float:
    """
    Log local likelihood ratio of the change-point Pareto model (index theta1 on (t, tau],
    theta2 above tau) against a single Pareto(theta_null) on the excesses over t.

    With n_b, n_tau the band and tail counts and S_t, S_tau the log-excess sums this is
    n_b log(theta_null/theta1) + n_tau log(theta_null/theta2) + S_t/theta_null
    - (S_t - S_tau)/theta1 - S_tau/theta2.

    Args:
        sample (Sample): Observations
        t (float): Threshold, > 0
        tau (float): Change point, >= t
        theta1 (float): Band index
        theta2 (float): Tail index
        theta_null (float): Index of the single-Pareto model

    Raises:
        ArgumentError: t <= 0 or tau < t
        TailDomainError: Non-positive index

    Returns:
        float: Log-likelihood ratio
    """
    _check_indices(theta1, theta2, theta_null)
    if not t > 0:
        raise ArgumentError(f"threshold must be positive, got {t}")
    if tau < t:
        raise ArgumentError(f"band needs t <= tau, got t={t}, tau={tau}")
    (n_t, n_tau), (s_t, s_tau) = log_excess_sums(sample, [t, tau])
    n_band = n_t - n_tau
    return float(n_band * math.log(theta_null / theta1) + n_tau * math.log(theta_null / theta2)
                 + s_t / theta_null - (s_t - s_tau) / theta1 - s_tau / theta2)
