from typing import List, Optional

from fastapi import APIRouter, File, Query, UploadFile

from src.models.sample import Sample
from src.models.schemas import AdaptiveConfig, EstimateRequest, EstimateResult
from src.routes.http import http_error
from src.services.commands import estimate
from src.services.errors import TailFitError
from src.services.storage import parse_observations


router = APIRouter(prefix="/estimate", tags=["estimate"])


@router.post("", response_model=EstimateResult)
def estimate_values(body: EstimateRequest):
    """
    Adaptive tail selection and quantile estimates for the posted observations.

    Args:
        body (EstimateRequest): Observations, procedure parameters and quantile levels

    Raises:
        HTTPException: 422 for invalid data or configuration, 500 for numeric failures

    Returns:
        EstimateResult: Selected tail and quantiles
    """
    try:
        return estimate(Sample(body.values), body.adaptive, body.p_levels)
    except TailFitError as err:
        raise http_error(err) from err


@router.post("/upload", response_model=EstimateResult)
async def estimate_file(file: UploadFile = File(),
                        p: Optional[List[float]] = Query(default=None),
                        z: Optional[float] = Query(default=None, gt=0)):
    """
    Same as POST /estimate for a file in the command-line input format (one observation per line).

    Args:
        file (UploadFile): Data file. Defaults to File().
        p (Optional[List[float]]): Quantile levels, repeatable query parameter
        z (Optional[float]): Critical value; the configured default when omitted

    Raises:
        HTTPException: 422 for unreadable data or invalid configuration

    Returns:
        EstimateResult: Selected tail and quantiles
    """
    content = await file.read()
    adaptive = AdaptiveConfig() if z is None else AdaptiveConfig(critical_value=z)
    try:
        values = parse_observations(content.decode("utf-8", errors="replace"))
        return estimate(Sample(values), adaptive, p)
    except TailFitError as err:
        raise http_error(err) from err
