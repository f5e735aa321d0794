import warnings

import pytest

from src.routes.http import http_error
from src.services.errors import ArgumentError, NumericError


def test_read_laws(client):
    response = client.get("/api/laws")
    assert response.status_code == 200, response.text
    laws = {law["name"]: law["params"] for law in response.json()}
    assert {"pareto", "cauchy", "hall", "gpd", "loggamma"} <= set(laws)
    assert "beta" in laws["hall"]


def test_fit_pareto(client):
    response = client.get("/api/laws/pareto/fit", params={"t": 3, "theta": 2})
    assert response.status_code == 200, response.text
    data = response.json()
    assert data["t"] == 3.0
    assert data["theta_fit"] == pytest.approx(2.0)
    assert data["alpha"] == pytest.approx(2.0)
    assert data["chi2"] == pytest.approx(0.0, abs=1e-8)
    assert data["error"] is None


def test_fit_unknown_law(client):
    response = client.get("/api/laws/weibull/fit", params={"t": 3})
    assert response.status_code == 422, response.text
    assert "unknown law" in response.json()["detail"]


def test_fit_bad_parameter(client):
    response = client.get("/api/laws/pareto/fit", params={"t": 3, "theta": "abc"})
    assert response.status_code == 422, response.text
    assert response.json()["detail"] == "parameter theta needs a number, got 'abc'"


def test_fit_threshold_outside_support(client):
    response = client.get("/api/laws/pareto/fit", params={"t": 0.5})
    assert response.status_code == 200, response.text
    data = response.json()
    assert data["theta_fit"] is None
    assert "outside the support" in data["error"]


def test_fit_negative_threshold(client):
    response = client.get("/api/laws/pareto/fit", params={"t": -1})
    assert response.status_code == 422, response.text


def test_http_error_codes():
    with warnings.catch_warnings():
        warnings.simplefilter("error", DeprecationWarning)
        numeric = http_error(NumericError("quadrature diverges", residual=1.0))
        domain = http_error(ArgumentError("threshold must be positive"))
    assert numeric.status_code == 500
    assert domain.status_code == 422
    assert domain.detail == "threshold must be positive"
