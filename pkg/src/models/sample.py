"""
Immutable sample of positive observations with cached descending order statistics
"""
from typing import Iterable

import numpy as np

from src.services.errors import ArgumentError, TailDomainError


class Sample:
    """
    Positive observations X_1..X_n and their order statistics X_{n,1} >= ... >= X_{n,n}.

    Ties are kept; the descending order breaks them by original index (stable sort).
    All cached arrays are read-only.

    Args:
        values (Iterable[float]): Observations, strictly positive and finite

    Raises:
        ArgumentError: Empty input
        TailDomainError: Non-positive or non-finite observation
    """
    __slots__ = ("_values", "_order_desc", "_desc", "_asc", "_log_desc", "_cum_log")

    def __init__(self, values: Iterable[float]):
        arr = np.array(values, dtype=float).ravel()
        if arr.size == 0:
            raise ArgumentError("sample must contain at least one observation")
        bad = np.flatnonzero(~np.isfinite(arr) | (arr <= 0))
        if bad.size:
            i = int(bad[0])
            raise TailDomainError(f"non-positive observation at index {i}: {arr[i]!r}")

        order = np.argsort(-arr, kind="stable")
        desc = arr[order]
        log_desc = np.log(desc)
        cum_log = np.concatenate(([0.0], np.cumsum(log_desc)))
        for a in (arr, order, desc, log_desc, cum_log):
            a.flags.writeable = False
        self._values = arr
        self._order_desc = order
        self._desc = desc
        self._asc = desc[::-1]
        self._log_desc = log_desc
        self._cum_log = cum_log

    def __len__(self) -> int:
        return self._values.size

    def __repr__(self) -> str:
        return f"Sample(n={self.n}, max={self._desc[0]:.6g}, min={self._desc[-1]:.6g})"

    def __setattr__(self, name, value):
        if hasattr(self, "_cum_log"):
            raise AttributeError("Sample is immutable")
        object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return self._values.size

    @property
    def values(self) -> np.ndarray:
        """Observations in their original order"""
        return self._values

    @property
    def order_desc(self) -> np.ndarray:
        """Permutation of original indices giving the descending order"""
        return self._order_desc

    @property
    def desc(self) -> np.ndarray:
        """X_{n,1} >= X_{n,2} >= ... >= X_{n,n}"""
        return self._desc

    @property
    def log_desc(self) -> np.ndarray:
        return self._log_desc

    def order_statistic(self, k: int) -> float:
        """
        k-th largest observation X_{n,k}, 1-based

        Args:
            k (int): Rank from the top

        Raises:
            ArgumentError: k outside 1..n

        Returns:
            float: X_{n,k}
        """
        if not 1 <= k <= self.n:
            raise ArgumentError(f"order statistic rank {k} outside 1..{self.n}")
        return float(self._desc[k - 1])

    def counts_above(self, t) -> np.ndarray:
        """
        Number of observations strictly greater than t (vectorized over t)

        Args:
            t (float | np.ndarray): Thresholds

        Returns:
            np.ndarray: Integer counts
        """
        return self.n - np.searchsorted(self._asc, t, side="right")

    def top_log_sum(self, counts) -> np.ndarray:
        """
        Sum of log X_{n,i} over the top ``counts`` order statistics (vectorized)

        Args:
            counts (int | np.ndarray): Number of upper order statistics

        Returns:
            np.ndarray: Partial sums of logs
        """
        return self._cum_log[counts]

    def power(self, c: float) -> "Sample":
        """
        Sample of X_i ** c, c > 0

        Args:
            c (float): Positive exponent

        Returns:
            Sample: Transformed sample
        """
        if c <= 0:
            raise TailDomainError("power transform needs c > 0")
        return Sample(self._values ** c)
