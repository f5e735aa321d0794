"""
Divergences between Pareto laws and between excess laws and Pareto laws.

+inf is the numeric infinity and propagates through comparisons.
"""
import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from src.config.settings import settings
from src.services.errors import TailDomainError
from src.services.numerics import quad

if TYPE_CHECKING:
    from src.models.laws import Law


logger = logging.getLogger(__name__)

_SERIES_CUTOFF = 1e-4


def g_func(x):
    """
    G(x) = x - log(1 + x), x > -1, with a series branch near 0

    Args:
        x (float | np.ndarray): Argument(s)

    Returns:
        float | np.ndarray: G(x)
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = x - np.log1p(x)
    series = x * x * (0.5 - x * (1.0 / 3.0 - x * (0.25 - x / 5.0)))
    out = np.where(np.abs(x) < _SERIES_CUTOFF, series, direct)
    return out if out.ndim else float(out)


def kl_pareto_array(theta1, theta2) -> np.ndarray:
    """
    Vectorized K(theta1, theta2); +inf wherever an index is 0, no validation

    Args:
        theta1 (np.ndarray): First indices
        theta2 (np.ndarray): Second indices

    Returns:
        np.ndarray: Divergences in nats
    """
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    degenerate = (theta1 == 0) | (theta2 == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(degenerate, 1.0, theta1 / np.where(theta2 == 0, 1.0, theta2))
    return np.where(degenerate, np.inf, g_func(ratio - 1.0))


def kl_pareto(theta1: float, theta2: float) -> float:
    """
    Kullback-Leibler divergence K(theta1, theta2) = G(theta1/theta2 - 1) between
    Pareto laws P_theta1 and P_theta2

    Args:
        theta1 (float): Index of the first law, >= 0
        theta2 (float): Index of the second law, >= 0

    Raises:
        TailDomainError: Negative or NaN index

    Returns:
        float: Divergence in nats, +inf if an index is 0
    """
    if not (theta1 >= 0 and theta2 >= 0):
        raise TailDomainError(f"Pareto indices must be >= 0, got ({theta1}, {theta2})")
    if theta1 == 0 or theta2 == 0:
        return math.inf
    return float(g_func(theta1 / theta2 - 1.0))


def rho_star(x: float, y: float) -> float:
    """
    Distance max(|log(x/y)|, |1/x - 1/y|)

    Args:
        x (float): Positive value
        y (float): Positive value

    Raises:
        TailDomainError: Non-positive input

    Returns:
        float: Distance
    """
    if not (x > 0 and y > 0):
        raise TailDomainError(f"rho_star needs positive arguments, got ({x}, {y})")
    return max(abs(math.log(x / y)), abs(1.0 / x - 1.0 / y))


def _check_excess_args(law: "Law", t: float, theta: float) -> None:
    if not theta > 0:
        raise TailDomainError(f"Pareto index must be > 0, got {theta}")
    law.check_threshold(t)


def excess_logpdf(law: "Law", t: float, x):
    """log density of the excess law F_t at x >= 1"""
    return math.log(t) + law.logpdf(t * x) - law.logsf(t)


def _pareto_logpdf(theta: float, x):
    return -math.log(theta) - (1.0 / theta + 1.0) * np.log(x)


def break_points_u(law: "Law", t: float) -> list[float]:
    """Density kinks of F_t mapped to u = t/x"""
    return [t / b for b in law.breakpoints if b > t]


def kl_excess_vs_pareto(law: "Law", t: float, theta: float) -> float:
    """
    K(F_t, P_theta) by quadrature on u = 1/x over (0, 1]

    Args:
        law (Law): Analytic law F
        t (float): Threshold in the support with F(t) < 1
        theta (float): Pareto index, > 0

    Raises:
        TailDomainError: Threshold outside the support or theta <= 0
        NumericError: Quadrature did not converge

    Returns:
        float: Divergence in nats, clipped at 0
    """
    _check_excess_args(law, t, theta)

    def integrand(u: float) -> float:
        if u == 0.0:
            return 0.0
        x = 1.0 / u
        lf = float(excess_logpdf(law, t, x))
        if lf == -math.inf:
            return 0.0
        return math.exp(lf + 2.0 * math.log(x)) * (lf - float(_pareto_logpdf(theta, x)))

    value, _ = quad(integrand, 0.0, 1.0, points=break_points_u(law, t))
    return max(value, 0.0)


def chi2_excess_vs_pareto(law: "Law", t: float, theta: float) -> float:
    """
    chi^2(F_t, P_theta) = int f_t^2 / p_theta - 1 over [1, inf).

    The integral is accumulated over dyadic pieces [2^j, 2^(j+1)]; the partial sums
    are extrapolated with the geometric tail implied by the ratio of the last two pieces
    and the extrapolated sums must Cauchy-converge within settings.chi2_max_doublings
    doublings, otherwise the integral is declared divergent.

    Args:
        law (Law): Analytic law F
        t (float): Threshold in the support with F(t) < 1
        theta (float): Pareto index, > 0

    Raises:
        TailDomainError: Threshold outside the support or theta <= 0
        NumericError: A piece failed to integrate

    Returns:
        float: Divergence, +inf when the integral diverges
    """
    _check_excess_args(law, t, theta)
    tol_abs, tol_rel = settings.quad_epsabs, settings.quad_epsrel
    bps = [b / t for b in law.breakpoints if b > t]

    def piece(a: float) -> float:
        def integrand(s: float) -> float:
            x = a * math.exp(s)
            lf = float(excess_logpdf(law, t, x))
            if lf == -math.inf:
                return 0.0
            return math.exp(2.0 * lf - float(_pareto_logpdf(theta, x))) * x
        pts = [math.log(b / a) for b in bps if a < b < 2 * a]
        return quad(integrand, 0.0, math.log(2.0), points=pts)[0]

    total = 0.0
    prev_piece = None
    prev_extrap = None
    agreements = 0
    for j in range(settings.chi2_max_doublings):
        current = piece(2.0 ** j)
        if not math.isfinite(current):
            break
        total += current
        extrap = math.inf
        if prev_piece is not None and prev_piece > 0:
            r = current / prev_piece
            if r < 1.0:
                extrap = total + current * r / (1.0 - r)
        elif prev_piece == 0 and current == 0:
            extrap = total
        if prev_extrap is not None and math.isfinite(extrap) and math.isfinite(prev_extrap) \
                and abs(extrap - prev_extrap) <= tol_abs + tol_rel * abs(extrap):
            agreements += 1
            if agreements >= 2:
                return max(extrap - 1.0, 0.0)
        else:
            agreements = 0
        prev_piece, prev_extrap = current, extrap

    logger.warning("chi2(F_t, P_theta) diverges for law=%s t=%g theta=%g (partial sum %.6g after %d doublings)",
                   law.name, t, theta, total, settings.chi2_max_doublings)
    return math.inf
