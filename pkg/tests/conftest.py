import numpy as np
import pytest

from fastapi.testclient import TestClient

from main import app
from src.models.laws import ParetoChangePoint
from src.models.sample import Sample
from src.services.montecarlo import rep_rng


SEED = 20240318


def pareto_values(n: int, theta: float = 1.0, rep: int = 0) -> np.ndarray:
    u = rep_rng(SEED, rep).random(n)
    return (1.0 - u) ** (-theta)


@pytest.fixture(scope="module")
def client() -> TestClient:
    with TestClient(app) as client:
        yield client


@pytest.fixture(scope="module")
def pareto_sample() -> Sample:
    return Sample(pareto_values(1000))


@pytest.fixture(scope="module")
def changepoint_sample() -> Sample:
    law = ParetoChangePoint(theta1=3.0, theta2=1.0, tau=1000.0)
    return Sample(law.rvs(1000, rep_rng(SEED, 0)))


@pytest.fixture()
def data_file(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("value\n" + "\n".join(f"{v:.17g}" for v in pareto_values(1000)) + "\n")
    return path
