from typing import List

from fastapi import APIRouter, Query, Request

from src.models.schemas import AnalyzeRow, LawSpec
from src.routes.http import http_error
from src.services.distributions import LAWS, build_law, fit_diagnostics
from src.services.errors import ArgumentError, TailFitError


router = APIRouter(prefix="/laws", tags=["laws"])


@router.get("", response_model=List[LawSpec])
def read_laws():
    """
    Built-in laws with their default parameters.

    Returns:
        List[LawSpec]: One entry per law
    """
    return [cls().spec() for cls in LAWS.values()]


@router.get("/{name}/fit", response_model=AnalyzeRow)
def fit_law(name: str, request: Request, t: float = Query(gt=0)):
    """
    Fitted Pareto index, alpha_F(t) and chi-square distance to the fitted Pareto tail at one threshold.
    Law parameters other than the defaults are passed as extra query parameters, e.g. ?t=10&theta=2.

    Args:
        name (str): Law name
        request (Request): Incoming request, read for the law parameters
        t (float): Threshold

    Raises:
        HTTPException: 422 for unknown laws or parameters

    Returns:
        AnalyzeRow: Diagnostics at t
    """
    try:
        params = {}
        for key, value in request.query_params.items():
            if key == "t":
                continue
            try:
                params[key] = float(value)
            except ValueError as err:
                raise ArgumentError(f"parameter {key} needs a number, got '{value}'") from err
        law = build_law(LawSpec(name=name, params=params))
        return fit_diagnostics(law, t)
    except TailFitError as err:
        raise http_error(err) from err
