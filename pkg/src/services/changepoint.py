"""
Lack-of-fit statistics of the single-Pareto tail against a two-segment alternative.

T(t, tau) = n_{t,tau} K(theta_band, theta_t) + n_tau K(theta_tau, theta_t); a term whose
count is 0 is dropped, a zero estimate with a positive count gives +inf.
"""
import math

import numpy as np

from src.models.sample import Sample
from src.models.schemas import TestStatPair, WindowResult
from src.services.divergences import kl_pareto_array
from src.services.errors import ArgumentError, ConfigurationError
from src.services.tail_estimators import log_excess_sums

_ROUNDING = 1e-9


def window_bounds(m: int, rho: float, delta: float) -> tuple[int, int]:
    """
    Integer window ceil(rho m) <= k <= floor((1 - delta) m)

    Args:
        m (int): Tested index
        rho (float): Lower fraction
        delta (float): Upper margin

    Returns:
        tuple[int, int]: (k_lo, k_hi), possibly empty (k_lo > k_hi)
    """
    return math.ceil(rho * m - _ROUNDING), math.floor((1.0 - delta) * m + _ROUNDING)


def _components(sample: Sample, t: float, taus: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n_t, s_t = log_excess_sums(sample, t)
    n_tau, s_tau = log_excess_sums(sample, taus)
    n_band = n_t - n_tau
    theta_t = s_t / n_t if n_t else 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        theta_band = np.where(n_band > 0, (s_t - s_tau) / np.maximum(n_band, 1), 0.0)
        theta_tau = np.where(n_tau > 0, s_tau / np.maximum(n_tau, 1), 0.0)
        t1 = np.where(n_band > 0, n_band * kl_pareto_array(theta_band, theta_t), 0.0)
        t2 = np.where(n_tau > 0, n_tau * kl_pareto_array(theta_tau, theta_t), 0.0)
    return t1, t2


def t_pair(sample: Sample, t: float, tau: float) -> TestStatPair:
    """
    Band and tail components of T(t, tau)

    Args:
        sample (Sample): Observations
        t (float): Threshold, > 0
        tau (float): Candidate change point, > t

    Raises:
        ArgumentError: t <= 0 or tau <= t

    Returns:
        TestStatPair: (t1, t2, t1 + t2)
    """
    if not t > 0:
        raise ArgumentError(f"threshold must be positive, got {t}")
    if not tau > t:
        raise ArgumentError(f"change point must exceed the threshold, got t={t}, tau={tau}")
    t1, t2 = _components(sample, t, np.array([tau]))
    a, b = float(t1[0]), float(t2[0])
    return TestStatPair(t1=a, t2=b, total=a + b)


def window_arrays(sample: Sample, m: int, k_lo: int, k_hi: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Components of T_{n,m,k} = T(X_{n,m}, X_{n,k}) for k = k_lo..k_hi

    Returns:
        tuple[np.ndarray, np.ndarray]: Band and tail components
    """
    taus = sample.desc[k_lo - 1:k_hi]
    return _components(sample, float(sample.desc[m - 1]), taus)


def t_window(sample: Sample, m: int, rho: float, delta: float, trace: bool = False) -> WindowResult:
    """
    Windowed statistic T_{n,m} = max_k T_{n,m,k}; best_k is the smallest k maximizing the
    tail component

    Args:
        sample (Sample): Observations
        m (int): Tested index, 1 <= m <= n
        rho (float): Lower window fraction
        delta (float): Upper window margin
        trace (bool): Keep the per-k components. Defaults to False.

    Raises:
        ArgumentError: m outside 1..n
        ConfigurationError: Empty integer window

    Returns:
        WindowResult: Window maximum and change-point location
    """
    if not 1 <= m <= sample.n:
        raise ArgumentError(f"window index m={m} outside 1..{sample.n}")
    k_lo, k_hi = window_bounds(m, rho, delta)
    if k_lo > k_hi:
        raise ConfigurationError(f"empty window for m={m}, rho={rho}, delta={delta}: "
                                 f"ceil(rho*m)={k_lo} > floor((1-delta)*m)={k_hi}")
    t1, t2 = window_arrays(sample, m, k_lo, k_hi)
    total = t1 + t2
    per_k = None
    if trace:
        per_k = [(k_lo + j, TestStatPair(t1=float(a), t2=float(b), total=float(a + b)))
                 for j, (a, b) in enumerate(zip(t1, t2))]
    return WindowResult(m=m, k_range=(k_lo, k_hi), best_k=k_lo + int(np.argmax(t2)),
                        t_max=float(total.max()), per_k=per_k)
