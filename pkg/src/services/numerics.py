"""
Quadrature and monotone inversion shared by the divergence and distribution services
"""
import logging
import warnings
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from src.config.settings import settings
from src.services.errors import NumericError


logger = logging.getLogger(__name__)


def quad(func: Callable[[float], float],
         a: float,
         b: float,
         points: Optional[Sequence[float]] = None,
         epsabs: float | None = None,
         epsrel: float | None = None) -> tuple[float, float]:
    """
    Adaptive Gauss-Kronrod quadrature on a finite interval with the package tolerances

    Args:
        func (Callable[[float], float]): Integrand
        a (float): Lower limit
        b (float): Upper limit
        points (Optional[Sequence[float]]): Interior break points (integrand kinks)
        epsabs (float | None): Absolute tolerance. Defaults to settings.quad_epsabs.
        epsrel (float | None): Relative tolerance. Defaults to settings.quad_epsrel.

    Raises:
        NumericError: Divergent integral, or a flagged result whose error estimate exceeds the tolerance

    Returns:
        tuple[float, float]: Integral value and error estimate
    """
    epsabs = settings.quad_epsabs if epsabs is None else epsabs
    epsrel = settings.quad_epsrel if epsrel is None else epsrel
    inner = [p for p in (points or ()) if a < p < b]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=settings.quad_limit,
                             points=inner or None, full_output=1)
    value, abserr = float(out[0]), float(out[1])
    if not np.isfinite(value):
        raise NumericError(f"quadrature on [{a:g}, {b:g}] returned {value}", residual=abserr)
    if len(out) > 3:
        message = str(out[3])
        if "divergent" in message:
            raise NumericError(f"quadrature on [{a:g}, {b:g}] diverges", residual=abserr,
                               detail=message.splitlines()[0])
        allowed = 10 * max(epsabs, epsrel * abs(value))
        if abserr > allowed:
            raise NumericError(f"quadrature on [{a:g}, {b:g}] did not converge", residual=abserr,
                               detail=str(out[3]).splitlines()[0])
        logger.debug("quadrature warning accepted: %s (abserr=%.3g)", out[3], abserr)
    return value, abserr


def invert_decreasing(fun: Callable[[np.ndarray], np.ndarray],
                      target: np.ndarray,
                      lower: float,
                      rtol: float | None = None,
                      maxiter: int | None = None) -> np.ndarray:
    """
    Solve fun(x) = target for x >= lower, fun strictly decreasing (a survival function).

    Bracketing by doubling, then bisection until every bracket is narrower than rtol
    relative to its right end.

    Args:
        fun (Callable): Vectorized decreasing function
        target (np.ndarray): Values in (0, fun(lower)]
        lower (float): Left end of the search interval
        rtol (float | None): Relative tolerance, floored at a few ulps. Defaults to settings.inversion_rtol.
        maxiter (int | None): Iteration cap for each stage. Defaults to settings.inversion_maxiter.

    Raises:
        NumericError: No bracket found, or brackets still too wide after maxiter halvings

    Returns:
        np.ndarray: Solutions, same shape as target
    """
    rtol = max(settings.inversion_rtol if rtol is None else rtol, 4 * np.finfo(float).eps)
    maxiter = settings.inversion_maxiter if maxiter is None else maxiter
    target = np.atleast_1d(np.asarray(target, dtype=float))

    lo = np.full_like(target, lower)
    hi = np.full_like(target, max(2.0 * lower, lower + 1.0))
    for _ in range(maxiter):
        low_side = fun(hi) > target
        if not low_side.any():
            break
        lo = np.where(low_side, hi, lo)
        hi = np.where(low_side, 2.0 * hi, hi)
    else:
        raise NumericError("could not bracket the inverse", residual=float(np.max(fun(hi) - target)))

    def converged():
        return (hi - lo <= rtol * hi) | (hi <= np.finfo(float).tiny)

    for _ in range(maxiter):
        if np.all(converged()):
            break
        mid = 0.5 * (lo + hi)
        above = fun(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    else:
        width = float(np.max((hi - lo) / hi))
        raise NumericError("inverse did not converge", residual=width, detail=f"relative bracket width {width:.3g}")
    return 0.5 * (lo + hi)


def brentq_root(func: Callable[[float], float], lo: float, hi: float) -> float:
    """
    Scalar root in a sign-changing bracket

    Args:
        func (Callable[[float], float]): Function
        lo (float): Left end
        hi (float): Right end

    Returns:
        float: Root to the inversion tolerance
    """
    return optimize.brentq(func, lo, hi, xtol=1e-300, rtol=max(settings.inversion_rtol, 4 * np.finfo(float).eps),
                           maxiter=settings.inversion_maxiter)
