from http import HTTPStatus

from fastapi import HTTPException

from src.services.errors import NumericError, TailFitError


def http_error(err: TailFitError) -> HTTPException:
    """
    Map a service error to an HTTP error: 500 for numeric failures, 422 otherwise.

    Args:
        err (TailFitError): Service error

    Returns:
        HTTPException: Exception to raise from the route
    """
    if isinstance(err, NumericError):
        return HTTPException(status_code=HTTPStatus.INTERNAL_SERVER_ERROR, detail=str(err))
    return HTTPException(status_code=HTTPStatus.UNPROCESSABLE_ENTITY, detail=str(err))
