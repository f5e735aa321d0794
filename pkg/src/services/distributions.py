"""
Law registry and tail functionals of analytic laws: alpha_F, the fitted Pareto index
theta_t(F) and its diagnostics.
"""
import logging
import math
from typing import Dict, Literal, Type

import numpy as np
from pydantic import ValidationError

from src.models.laws import GPD, Hall, Law, LogGamma, LogPerturbedPareto, Pareto, ParetoChangePoint, PositiveCauchy
from src.models.sample import Sample
from src.models.schemas import AnalyzeRow, LawSpec
from src.services.divergences import (break_points_u, chi2_excess_vs_pareto, excess_logpdf, kl_excess_vs_pareto,
                                      kl_pareto, rho_star)
from src.services.errors import ArgumentError, ConfigurationError, NumericError, TailDomainError, TailFitError
from src.services.numerics import quad


logger = logging.getLogger(__name__)

LAWS: Dict[str, Type[Law]] = {cls.name: cls for cls in (
    Pareto, ParetoChangePoint, PositiveCauchy, LogGamma, LogPerturbedPareto, Hall, GPD)}


def build_law(spec: LawSpec) -> Law:
    """
    Instantiate a built-in law from its name and parameter map

    Args:
        spec (LawSpec): Name and parameters

    Raises:
        ConfigurationError: Unknown name or invalid parameters

    Returns:
        Law: The law
    """
    cls = LAWS.get(spec.name)
    if cls is None:
        raise ConfigurationError(f"unknown law '{spec.name}', expected one of {sorted(LAWS)}")
    unknown = set(spec.params) - set(cls.model_fields)
    if unknown:
        raise ConfigurationError(f"law '{spec.name}' has no parameters {sorted(unknown)}")
    try:
        return cls(**spec.params)
    except ValidationError as err:
        raise ConfigurationError(f"invalid parameters for law '{spec.name}': {err.errors()[0]['msg']}") from err


def alpha_F(law: Law, x: float) -> float:
    """
    (1 - F(x)) / (x f(x))

    Raises:
        TailDomainError: x outside the open support
    """
    law.check_point(x)
    return float(law.alpha(x))


def _log(v: float) -> float:
    return math.log(v) if v > 0 else -math.inf


def _excess_integral(law: Law, t: float, log_weight) -> float:
    """int_1^inf exp(log_weight(y)) F_t(dy) on u = 1/y"""
    def integrand(u: float) -> float:
        if u == 0.0:
            return 0.0
        y = 1.0 / u
        lf = float(excess_logpdf(law, t, y))
        if lf == -math.inf:
            return 0.0
        lw = log_weight(y)
        if lw == -math.inf:
            return 0.0
        return math.exp(lw + lf + 2.0 * math.log(y))

    return quad(integrand, 0.0, 1.0, points=break_points_u(law, t))[0]


def theta_fit(law: Law, t: float, method: Literal["auto", "quadrature"] = "auto") -> float:
    """
    Fitted Pareto index theta_t(F) = int_t^inf log(x/t) F(dx) / (1 - F(t)),
    the minimizer over theta of K(F_t, P_theta)

    Args:
        law (Law): Analytic law
        t (float): Threshold with F(t) < 1
        method (str): "auto" uses the law's closed form when it has one. Defaults to "auto".

    Raises:
        TailDomainError: Threshold outside the support
        NumericError: Quadrature failure

    Returns:
        float: theta_t(F)
    """
    law.check_threshold(t)
    if method == "auto":
        closed = law.theta_closed(t)
        if closed is not None:
            return float(closed)
    return _excess_integral(law, t, lambda y: _log(math.log(y)))


def mean_alpha(law: Law, t: float) -> float:
    """
    Tail mean of alpha_F over the excess law, int_t^inf alpha_F dF / (1 - F(t)); equals theta_t(F)

    Raises:
        TailDomainError: Threshold outside the support
        NumericError: Quadrature failure
    """
    law.check_threshold(t)
    return _excess_integral(law, t, lambda y: _log(float(law.alpha(t * y))))


def theta_fit_empirical(data: Sample, k: int, law: Law) -> float:
    """
    Approximation (1/k) sum_{i<=k} alpha_F(X_{n,i}) of theta_t(F) at t = X_{n,k}

    Args:
        data (Sample): Observations
        k (int): 1 <= k <= n
        law (Law): Law supplying alpha_F

    Raises:
        ArgumentError: k out of range
        TailDomainError: An order statistic outside the law's open support

    Returns:
        float: Mean of alpha_F over the top k observations
    """
    if not 1 <= k <= data.n:
        raise ArgumentError(f"k={k} outside 1..{data.n}")
    law.check_point(data.order_statistic(k))
    return float(np.mean(law.alpha(data.desc[:k])))


def sample(law: Law, n: int, rng: np.random.Generator) -> Sample:
    """
    n i.i.d. draws from the law

    Args:
        law (Law): Analytic law
        n (int): Sample size, >= 1
        rng (np.random.Generator): Seeded generator

    Returns:
        Sample: Draws
    """
    if n < 1:
        raise ArgumentError(f"sample size must be >= 1, got {n}")
    return Sample(law.rvs(n, rng))


def decomposition_check(law: Law, t: float, theta: float) -> tuple[float, float, float]:
    """
    Terms of K(F_t, P_theta) = K(F_t, P_{theta_t(F)}) + K(theta_t(F), theta)

    Args:
        law (Law): Analytic law
        t (float): Threshold
        theta (float): Pareto index, > 0

    Returns:
        tuple[float, float, float]: Left-hand side and the two right-hand terms
    """
    theta_t = theta_fit(law, t)
    return (kl_excess_vs_pareto(law, t, theta),
            kl_excess_vs_pareto(law, t, theta_t),
            kl_pareto(theta_t, theta))


def rho_sup(law: Law, t: float, theta: float, points: int = 400, decades: float = 12.0) -> float:
    """
    sup_{x >= t} rho_*(alpha_F(x), theta) over a log-spaced grid and the limit x -> inf,
    where alpha_F tends to the index of regular variation

    Args:
        law (Law): Analytic law
        t (float): Threshold
        theta (float): Pareto index, > 0
        points (int): Grid size. Defaults to 400.
        decades (float): Grid span above t in powers of ten. Defaults to 12.

    Returns:
        float: Supremum, +inf if alpha_F is unbounded on the grid
    """
    law.check_threshold(t)
    if not theta > 0:
        raise TailDomainError(f"Pareto index must be > 0, got {theta}")
    xs = t * np.logspace(0.0, decades, points)
    xs = xs[xs > law.support_left]
    alphas = np.append(np.asarray(law.alpha(xs), dtype=float), law.tail_index)
    if not np.all(np.isfinite(alphas) & (alphas > 0)):
        return math.inf
    return max(rho_star(float(a), theta) for a in alphas)


def chi2_bound(law: Law, t: float, theta: float) -> tuple[float, float, float]:
    """
    Bound on chi^2(F_t, P_theta) from the hazard-rate distance: with eps0 = rho_sup and
    eps1 = int (1 + log x)^2 x^eps0 F_t(dx), chi^2 <= eps1 e^eps0 eps0^2

    Args:
        law (Law): Analytic law
        t (float): Threshold
        theta (float): Pareto index, > 0

    Returns:
        tuple[float, float, float]: (eps0, eps1, bound); +inf entries when a moment diverges
    """
    eps0 = rho_sup(law, t, theta)
    if not math.isfinite(eps0):
        return eps0, math.inf, math.inf
    try:
        eps1 = _excess_integral(law, t, lambda y: 2.0 * math.log1p(math.log(y)) + eps0 * math.log(y))
    except NumericError as err:
        logger.warning("moment for the chi2 bound did not converge for %r at t=%g: %s", law, t, err)
        return eps0, math.inf, math.inf
    return eps0, eps1, eps1 * math.exp(eps0) * eps0 ** 2


def fit_diagnostics(law: Law, t: float) -> AnalyzeRow:
    """
    theta_t(F), alpha_F(t) and chi^2(F_t, P_{theta_t}) at one threshold; a failing
    quantity is left empty and the error recorded in the row

    Args:
        law (Law): Analytic law
        t (float): Threshold

    Returns:
        AnalyzeRow: Diagnostics
    """
    row = AnalyzeRow(t=t)
    try:
        row.theta_fit = theta_fit(law, t)
        if t > law.support_left:
            row.alpha = alpha_F(law, t)
        row.chi2 = chi2_excess_vs_pareto(law, t, row.theta_fit)
    except TailFitError as err:
        logger.warning("diagnostics failed for %r at t=%g: %s", law, t, err)
        row.error = str(err)
    return row
