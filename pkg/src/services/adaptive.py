"""
Stagewise adaptive choice of the tail: grid r_i = [i n / K_n], sequential window tests
from i = k0 upward, first rejection m_hat, change-point estimate k_hat.
"""
import logging
from typing import Iterator, List, Optional

import numpy as np

from src.models.sample import Sample
from src.models.schemas import AdaptiveConfig, TailSelection, WindowResult
from src.services.changepoint import t_window, window_arrays, window_bounds
from src.services.errors import ConfigurationError
from src.services.tail_estimators import hill


logger = logging.getLogger(__name__)

_ROUNDING = 1e-9


def build_grid(n: int, grid_length: int) -> List[int]:
    """
    Uniform grid r_i = floor(i n / K_n), i = 1..K_n

    Args:
        n (int): Sample size
        grid_length (int): K_n, 1 <= K_n <= n

    Raises:
        ConfigurationError: K_n outside 1..n

    Returns:
        List[int]: r_1..r_{K_n}, r_{K_n} = n
    """
    if not 1 <= grid_length <= n:
        raise ConfigurationError(f"grid length K_n={grid_length} must satisfy 1 <= K_n <= n={n}")
    return [i * n // grid_length for i in range(1, grid_length + 1)]


def _feasible_from(grid: np.ndarray, rho: float, delta: float) -> np.ndarray:
    """feasible[i-1] is True when k0 = i satisfies every grid condition"""
    prev = np.concatenate(([grid[0]], grid[:-1]))
    step_ok = (1.0 - delta) * grid <= prev + _ROUNDING
    step_ok[0] = True
    k_lo = np.ceil(rho * grid - _ROUNDING)
    k_hi = np.floor((1.0 - delta) * grid + _ROUNDING)
    window_ok = k_lo <= k_hi
    # conditions on i >= k0 must hold for the whole tail of the grid
    tail_ok = np.flip(np.logical_and.accumulate(np.flip(step_ok & window_ok)))
    anchor_ok = rho * grid >= grid[0] - _ROUNDING
    return tail_ok & anchor_ok


def check_feasibility(n: int, config: AdaptiveConfig, k0: int) -> None:
    """
    Validate the grid conditions (1 - delta) r_i <= r_{i-1} for i >= k0,
    rho r_{k0} >= r_1 and nonempty windows

    Raises:
        ConfigurationError: The first violated condition, with the offending values
    """
    grid = np.asarray(build_grid(n, config.grid_length))
    if not 1 <= k0 <= grid.size:
        raise ConfigurationError(f"starting index k0={k0} outside the grid 1..K_n={grid.size}")
    for i in range(max(k0, 2), grid.size + 1):
        r, r_prev = grid[i - 1], grid[i - 2]
        if (1.0 - config.delta) * r > r_prev + _ROUNDING:
            raise ConfigurationError(f"grid condition (1-delta)*r_i <= r_(i-1) fails at i={i}: "
                                     f"(1-{config.delta})*{r} > {r_prev}")
    r_k0 = grid[k0 - 1]
    if config.rho * r_k0 < grid[0] - _ROUNDING:
        raise ConfigurationError(f"grid condition rho*r_k0 >= r_1 fails: {config.rho}*{r_k0} < {grid[0]}")
    for i in range(k0, grid.size + 1):
        k_lo, k_hi = window_bounds(int(grid[i - 1]), config.rho, config.delta)
        if k_lo > k_hi:
            raise ConfigurationError(f"empty window at r_{i}={grid[i - 1]} for rho={config.rho}, delta={config.delta}")


def resolve_k0(n: int, config: AdaptiveConfig) -> int:
    """
    Absolute starting grid index. An explicit k0 is validated as given; otherwise
    round(k0_frac * n), capped at K_n, is moved up to the smallest feasible index.

    Args:
        n (int): Sample size
        config (AdaptiveConfig): Procedure parameters

    Raises:
        ConfigurationError: No feasible starting index

    Returns:
        int: k0
    """
    if config.k0 is not None:
        check_feasibility(n, config, config.k0)
        return config.k0
    grid = np.asarray(build_grid(n, config.grid_length))
    requested = min(max(1, int(round(config.k0_frac * n))), grid.size)
    feasible = np.flatnonzero(_feasible_from(grid, config.rho, config.delta)[requested - 1:])
    if feasible.size == 0:
        raise ConfigurationError(f"no feasible starting grid index >= {requested} for n={n}, "
                                 f"K_n={config.grid_length}, rho={config.rho}, delta={config.delta}")
    k0 = requested + int(feasible[0])
    if k0 != requested:
        logger.debug("k0 moved from %d to the feasible index %d", requested, k0)
    return k0


def grid_points(n: int, config: AdaptiveConfig) -> Iterator[tuple[int, int]]:
    """
    Tested (i, r_i) pairs, i = k0..K_n, each distinct grid value once

    Yields:
        tuple[int, int]: Grid index and value
    """
    grid = build_grid(n, config.grid_length)
    k0 = resolve_k0(n, config)
    last = None
    for i in range(k0, len(grid) + 1):
        r = grid[i - 1]
        if r != last:
            yield i, r
        last = r


def max_statistic(sample: Sample, config: AdaptiveConfig) -> float:
    """
    T_n = max over the tested grid of the window statistics (the calibration statistic)

    Args:
        sample (Sample): Observations
        config (AdaptiveConfig): Procedure parameters

    Returns:
        float: Maximum window statistic
    """
    best = 0.0
    for _, r in grid_points(sample.n, config):
        k_lo, k_hi = window_bounds(r, config.rho, config.delta)
        t1, t2 = window_arrays(sample, r, k_lo, k_hi)
        best = max(best, float((t1 + t2).max()))
    return best


def scan(sample: Sample, config: AdaptiveConfig) -> List[WindowResult]:
    """
    Window results at every tested grid point, without stopping at a rejection

    Args:
        sample (Sample): Observations
        config (AdaptiveConfig): Procedure parameters

    Returns:
        List[WindowResult]: One result per distinct grid value from r_{k0} on
    """
    return [t_window(sample, r, config.rho, config.delta) for _, r in grid_points(sample.n, config)]


def _theta_at(sample: Sample, k: int) -> float:
    # h_{n,n} is undefined; the last Hill estimate stands in for it
    return hill(sample, min(k, sample.n - 1))


def select(sample: Sample, config: AdaptiveConfig, full_trace: bool = False) -> TailSelection:
    """
    Sequential testing over the grid; stops at the first r_i with T_{n,r_i} > z

    Args:
        sample (Sample): Observations, n >= 2
        config (AdaptiveConfig): Procedure parameters with a critical value policy
        full_trace (bool): Keep scanning after the rejection so the trace covers the whole grid.
            The selection is unchanged. Defaults to False.

    Raises:
        ConfigurationError: Infeasible grid or missing critical value

    Returns:
        TailSelection: m_hat, k_hat, tau_hat = X_{n,k_hat}, theta_hat = h_{n,k_hat}
    """
    n = sample.n
    if n < 2:
        raise ConfigurationError("adaptive selection needs at least two observations")
    try:
        z = config.threshold(n)
    except ValueError as err:
        raise ConfigurationError(str(err)) from err

    trace: List[tuple[int, float]] = []
    hit: Optional[WindowResult] = None
    for _, r in grid_points(n, config):
        window = t_window(sample, r, config.rho, config.delta)
        trace.append((r, window.t_max))
        if hit is None and window.t_max > z:
            hit = window
            if not full_trace:
                break

    if hit is None:
        k_hat, m_hat = n, n
    else:
        k_hat, m_hat = hit.best_k, hit.m
    logger.debug("selection n=%d rejected=%s m_hat=%d k_hat=%d", n, hit is not None, m_hat, k_hat)
    return TailSelection(n=n, m_hat=m_hat, k_hat=k_hat, tau_hat=sample.order_statistic(k_hat),
                         theta_hat=_theta_at(sample, k_hat), rejected=hit is not None,
                         critical_value=z, trace=trace)
