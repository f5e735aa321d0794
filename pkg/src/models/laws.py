"""
Analytic heavy-tailed laws used as test models.

Every law exposes survival/density functions on its support [x0, inf), quantiles,
a sampler driven by an explicit numpy Generator, the function
alpha_F(x) = (1 - F(x)) / (x f(x)) and, where an elementary expression exists,
the fitted Pareto index theta_t(F) = E[log(X/t) | X > t].
"""
import math
from abc import ABC, abstractmethod
from typing import ClassVar, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PrivateAttr, model_validator
from scipy import stats

from src.models.schemas import LawSpec
from src.services.errors import ConfigurationError, TailDomainError
from src.services.numerics import brentq_root, invert_decreasing


def _out(a):
    a = np.asarray(a, dtype=float)
    return a if a.ndim else float(a)


class Law(BaseModel, ABC):
    """
    Base interface for the analytic laws

    Args:
        BaseModel: Inherited from BaseModel
    """
    name: ClassVar[str] = "law"

    model_config = ConfigDict(frozen=True)

    def __repr__(self):
        params = ", ".join(f"{k}={v:g}" for k, v in self.model_dump().items())
        return f"{self.__class__.__name__}({params})"

    @property
    def support_left(self) -> float:
        """Left end x0 of the support"""
        return 1.0

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Points where the density is not smooth"""
        return ()

    @property
    @abstractmethod
    def tail_index(self) -> float:
        """Index of regular variation gamma"""

    @abstractmethod
    def logsf(self, x):
        """log(1 - F(x))"""

    @abstractmethod
    def logpdf(self, x):
        """log f(x)"""

    def sf(self, x):
        return _out(np.exp(self.logsf(x)))

    def cdf(self, x):
        return _out(-np.expm1(self.logsf(x)))

    def pdf(self, x):
        return _out(np.exp(self.logpdf(x)))

    def isf(self, q):
        """
        Inverse survival function, numeric by default

        Args:
            q (float | np.ndarray): Tail probabilities in (0, 1]

        Returns:
            float | np.ndarray: x with 1 - F(x) = q
        """
        q = np.asarray(q, dtype=float)
        x = invert_decreasing(self.sf, q.ravel(), self.support_left)
        return _out(x.reshape(q.shape))

    def quantile(self, p):
        """
        Args:
            p (float | np.ndarray): Probabilities in [0, 1)

        Returns:
            float | np.ndarray: F^{-1}(p)
        """
        return self.isf(1.0 - np.asarray(p, dtype=float))

    def alpha(self, x):
        """
        alpha_F(x) = (1 - F(x)) / (x f(x)), the reciprocal of x times the hazard rate

        Args:
            x (float | np.ndarray): Points in the open support

        Returns:
            float | np.ndarray: alpha_F(x)
        """
        x = np.asarray(x, dtype=float)
        return _out(np.exp(self.logsf(x) - self.logpdf(x) - np.log(x)))

    def theta_closed(self, t: float) -> Optional[float]:
        """
        Elementary expression of theta_t(F), None when the law has none

        Args:
            t (float): Threshold

        Returns:
            Optional[float]: Fitted Pareto index
        """
        return None

    def rvs(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """
        n i.i.d. draws by inverse transform of uniforms on (0, 1); an exact zero from
        rng.random is drawn again since it maps onto the left end of the support

        Args:
            n (int): Number of draws
            rng (np.random.Generator): Seeded generator

        Returns:
            np.ndarray: Draws
        """
        u = np.asarray(rng.random(n), dtype=float)
        zeros = np.flatnonzero(u == 0.0)
        while zeros.size:
            u[zeros] = rng.random(zeros.size)
            zeros = zeros[u[zeros] == 0.0]
        return np.asarray(self.quantile(u), dtype=float)

    def check_threshold(self, t: float) -> None:
        """
        Raises:
            TailDomainError: t outside the support or beyond the right end
        """
        if not (t > 0 and t >= self.support_left and self.sf(t) > 0):
            raise TailDomainError(f"threshold {t} is outside the support of {self!r}")

    def check_point(self, x: float) -> None:
        """
        Raises:
            TailDomainError: x not in the open support
        """
        if not (x > self.support_left and x > 0 and self.sf(x) > 0):
            raise TailDomainError(f"point {x} is outside the open support of {self!r}")

    def spec(self) -> LawSpec:
        return LawSpec(name=self.name, params=self.model_dump())


class Pareto(Law):
    """
    Pareto law P_theta(x) = 1 - x^(-1/theta), x >= 1
    """
    name: ClassVar[str] = "pareto"
    theta: PositiveFloat = 1.0

    @property
    def tail_index(self) -> float:
        return self.theta

    def logsf(self, x):
        return _out(-np.log(x) / self.theta)

    def logpdf(self, x):
        return _out(-math.log(self.theta) - (1.0 / self.theta + 1.0) * np.log(x))

    def isf(self, q):
        return _out(np.asarray(q, dtype=float) ** (-self.theta))

    def alpha(self, x):
        return _out(np.full_like(np.asarray(x, dtype=float), self.theta))

    def theta_closed(self, t: float) -> Optional[float]:
        return self.theta


class ParetoChangePoint(Law):
    """
    Pareto change-point law: alpha_F = theta1 on [1, tau), theta2 on [tau, inf)
    """
    name: ClassVar[str] = "pareto_changepoint"
    theta1: PositiveFloat = 3.0
    theta2: PositiveFloat = 1.0
    tau:    float = Field(default=1000.0, ge=1.0)

    @property
    def tail_index(self) -> float:
        return self.theta2

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (self.tau,)

    def _index(self, x):
        return np.where(np.asarray(x) < self.tau, self.theta1, self.theta2)

    def logsf(self, x):
        lx = np.log(x)
        lt = math.log(self.tau)
        return _out(np.where(lx < lt, -lx / self.theta1, -lt / self.theta1 - (lx - lt) / self.theta2))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(self.logsf(x) - np.log(x) - np.log(self._index(x)))

    def isf(self, q):
        q = np.asarray(q, dtype=float)
        q_tau = self.tau ** (-1.0 / self.theta1)
        with np.errstate(divide="ignore"):
            below = q ** (-self.theta1)
            above = self.tau * (q / q_tau) ** (-self.theta2)
        return _out(np.where(q > q_tau, below, above))

    def alpha(self, x):
        return _out(self._index(x).astype(float))

    def theta_closed(self, t: float) -> Optional[float]:
        if t >= self.tau:
            return self.theta2
        return self.theta1 + (self.theta2 - self.theta1) * (t / self.tau) ** (1.0 / self.theta1)


class PositiveCauchy(Law):
    """
    Positive part of the Cauchy law, F(x) = (2/pi) arctan x, x >= 0
    """
    name: ClassVar[str] = "cauchy"

    @property
    def support_left(self) -> float:
        return 0.0

    @property
    def tail_index(self) -> float:
        return 1.0

    def sf(self, x):
        return _out(2.0 / math.pi * np.arctan2(1.0, x))

    def cdf(self, x):
        return _out(2.0 / math.pi * np.arctan(x))

    def logsf(self, x):
        return _out(np.log(self.sf(x)))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return _out(math.log(2.0 / math.pi) - np.logaddexp(0.0, 2.0 * np.log(x)))

    def isf(self, q):
        with np.errstate(divide="ignore"):
            return _out(1.0 / np.tan(0.5 * math.pi * np.asarray(q, dtype=float)))

    def quantile(self, p):
        return _out(np.tan(0.5 * math.pi * np.asarray(p, dtype=float)))

    def alpha(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.arctan2(1.0, x) * (1.0 + x * x) / x)


class LogGamma(Law):
    """
    Log-gamma law F(x) = G(log x), x >= 1, G the gamma d.f. with given shape and rate
    """
    name: ClassVar[str] = "loggamma"
    shape: PositiveFloat = 2.0
    rate:  PositiveFloat = 1.0

    @property
    def tail_index(self) -> float:
        return 1.0 / self.rate

    def _y(self, x):
        return np.log(x)

    def logsf(self, x):
        return _out(stats.gamma.logsf(self._y(x), self.shape, scale=1.0 / self.rate))

    def logpdf(self, x):
        y = self._y(x)
        return _out(stats.gamma.logpdf(y, self.shape, scale=1.0 / self.rate) - y)

    def isf(self, q):
        return _out(np.exp(stats.gamma.isf(q, self.shape, scale=1.0 / self.rate)))

    def alpha(self, x):
        y = self._y(x)
        scale = 1.0 / self.rate
        return _out(np.exp(stats.gamma.logsf(y, self.shape, scale=scale) - stats.gamma.logpdf(y, self.shape, scale=scale)))

    def theta_closed(self, t: float) -> Optional[float]:
        # mean excess of the gamma law at log t
        y = math.log(t)
        scale = 1.0 / self.rate
        ratio = math.exp(stats.gamma.logsf(y, self.shape + 1.0, scale=scale) - stats.gamma.logsf(y, self.shape, scale=scale))
        return self.shape * scale * ratio - y

    def rvs(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.exp(rng.gamma(self.shape, 1.0 / self.rate, size=n))


class LogPerturbedPareto(Law):
    """
    Log-perturbed Pareto law F(x) = 1 - c x^(-1/beta) log x, x >= x0 >= e^beta,
    with c = x0^(1/beta) / log x0 so that F(x0) = 0
    """
    name: ClassVar[str] = "log_perturbed_pareto"
    beta: PositiveFloat = 1.0
    x0:   PositiveFloat = math.e

    _log_c: float = PrivateAttr(default=0.0)

    @model_validator(mode="after")
    def _check_monotone(self):
        if math.log(self.x0) < self.beta * (1.0 - 1e-12):
            raise ValueError(f"x0 must be >= e^beta = {math.exp(self.beta):.6g} for a monotone d.f.")
        return self

    def model_post_init(self, __context) -> None:
        self._log_c = math.log(self.x0) / self.beta - math.log(math.log(self.x0))

    @property
    def support_left(self) -> float:
        return self.x0

    @property
    def tail_index(self) -> float:
        return self.beta

    def logsf(self, x):
        lx = np.log(x)
        return _out(self._log_c - lx / self.beta + np.log(lx))

    def logpdf(self, x):
        lx = np.log(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return _out(self._log_c - (1.0 / self.beta + 1.0) * lx + np.log(lx / self.beta - 1.0))

    def alpha(self, x):
        with np.errstate(divide="ignore"):
            return _out(self.beta / (1.0 - self.beta / np.log(x)))

    def theta_closed(self, t: float) -> Optional[float]:
        return self.beta * (1.0 + self.beta / math.log(t))


class Hall(Law):
    """
    Hall-type law F(x) = 1 - c_beta x^(-1/beta) - c_gamma x^(-1/gamma), x >= x0,
    beta > gamma > 0; x0 is the point on the decreasing branch where F(x0) = 0.
    c_gamma may be negative as long as F increases on [x0, inf).
    """
    name: ClassVar[str] = "hall"
    beta:    PositiveFloat = 1.0
    gamma:   PositiveFloat = 0.4
    c_beta:  PositiveFloat = 2.0
    c_gamma: float = -1.0

    _x0: float = PrivateAttr(default=1.0)

    @model_validator(mode="after")
    def _check_order(self):
        if not self.beta > self.gamma:
            raise ValueError("Hall law needs beta > gamma")
        return self

    def model_post_init(self, __context) -> None:
        self._x0 = self._solve_x0()

    def _raw_sf(self, x):
        return self.c_beta * x ** (-1.0 / self.beta) + self.c_gamma * x ** (-1.0 / self.gamma)

    def _solve_x0(self) -> float:
        if self.c_gamma < 0:
            # stationary point of the survival function; it decreases to the right of it
            ratio = (-self.c_gamma * self.beta) / (self.gamma * self.c_beta)
            left = ratio ** (1.0 / (1.0 / self.gamma - 1.0 / self.beta))
            if self._raw_sf(left) < 1.0:
                raise ConfigurationError("Hall law parameters never reach F = 0 on the decreasing branch")
        else:
            left = 1e-12
            while self._raw_sf(left) < 1.0:
                left /= 2.0
        right = max(2.0 * left, 1.0)
        while self._raw_sf(right) >= 1.0:
            right *= 2.0
        return brentq_root(lambda x: self._raw_sf(x) - 1.0, left, right)

    @property
    def support_left(self) -> float:
        return self._x0

    @property
    def tail_index(self) -> float:
        return self.beta

    def logsf(self, x):
        with np.errstate(divide="ignore"):
            return _out(np.log(np.minimum(self._raw_sf(np.asarray(x, dtype=float)), 1.0)))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        dens = self.c_beta / self.beta * x ** (-1.0 / self.beta - 1.0) + self.c_gamma / self.gamma * x ** (-1.0 / self.gamma - 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            return _out(np.log(np.maximum(dens, 0.0)))

    def alpha(self, x):
        x = np.asarray(x, dtype=float)
        a = self.c_beta * x ** (-1.0 / self.beta)
        b = self.c_gamma * x ** (-1.0 / self.gamma)
        return _out((a + b) / (a / self.beta + b / self.gamma))

    def theta_closed(self, t: float) -> Optional[float]:
        a = self.c_beta * t ** (-1.0 / self.beta)
        b = self.c_gamma * t ** (-1.0 / self.gamma)
        return (self.beta * a + self.gamma * b) / (a + b)


class GPD(Law):
    """
    Generalized Pareto law F(x) = 1 - (1 + shape x / scale)^(-1/shape), x >= 0
    """
    name: ClassVar[str] = "gpd"
    shape: PositiveFloat = 1.0
    scale: PositiveFloat = 1.0

    @property
    def support_left(self) -> float:
        return 0.0

    @property
    def tail_index(self) -> float:
        return self.shape

    def logsf(self, x):
        return _out(-np.log1p(self.shape * np.asarray(x, dtype=float) / self.scale) / self.shape)

    def logpdf(self, x):
        z = np.log1p(self.shape * np.asarray(x, dtype=float) / self.scale)
        return _out(-math.log(self.scale) - (1.0 / self.shape + 1.0) * z)

    def isf(self, q):
        q = np.asarray(q, dtype=float)
        return _out(self.scale * np.expm1(-self.shape * np.log(q)) / self.shape)

    def alpha(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return _out((self.scale + self.shape * x) / x)

    def theta_closed(self, t: float) -> Optional[float]:
        if self.shape != 1.0:
            return None
        return (1.0 + t / self.scale) * math.log1p(self.scale / t)
