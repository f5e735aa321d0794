from fastapi.testclient import TestClient

import main
from src import __version__

client = TestClient(main.app)


def test_read_main():
    response = client.get("/")
    assert response.status_code == 200
    assert response.json() == {"message": f"tailfit {__version__} - adaptive heavy-tail estimation via FastAPI"}


def test_openapi_lists_routes():
    response = client.get("/openapi.json")
    assert response.status_code == 200
    paths = response.json()["paths"]
    assert "/api/estimate" in paths
    assert "/api/estimate/upload" in paths
    assert "/api/laws" in paths
    assert "/api/laws/{name}/fit" in paths
