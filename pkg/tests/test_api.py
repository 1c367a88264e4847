import pytest
from httpx import AsyncClient

from workbench.core.config import settings

pytestmark = pytest.mark.integration


class TestHealthEndpoints:
    """Health check endpoints."""

    async def test_health_check(self, client: AsyncClient):
        response = await client.get("/health")
        assert response.status_code == 200

        data = response.json()
        assert data["status"] == "healthy"
        assert data["service"] == settings.APP_NAME
        assert "version" in data
        assert "timestamp" in data
        assert "X-Process-Time" in response.headers


class TestSpaceEndpoints:
    """Space checks over bundled and inline documents."""

    async def test_examples(self, client: AsyncClient):
        response = await client.get("/api/v1/spaces/examples")
        assert response.status_code == 200
        assert "p1_model" in response.json()

    async def test_validate_bundled_space(self, client: AsyncClient):
        response = await client.post("/api/v1/spaces/validate", json={"space": "p1_model"})
        assert response.status_code == 200

        data = response.json()
        assert data["command"] == "validate"
        assert data["verdict"] is True
        assert "data" not in data

    async def test_schematic_failure_is_a_report(self, client: AsyncClient):
        response = await client.post(
            "/api/v1/spaces/schematic", json={"space": "two_chart_no_top"}
        )
        assert response.status_code == 200
        data = response.json()
        assert data["verdict"] is False
        assert "fails at z=c for x=a, y=b: witness pair (x, x - 1)" in data["lines"]

    async def test_inline_space(self, client: AsyncClient):
        space = {
            "name": "line",
            "elements": {"pt": {"variables": ["x"]}},
        }
        response = await client.post("/api/v1/spaces/affine", json={"space": space})
        assert response.status_code == 200
        assert response.json()["verdict"] is True

    async def test_centre(self, client: AsyncClient):
        response = await client.post(
            "/api/v1/spaces/centre", json={"space": "p1_model", "at": "p0", "prime": []}
        )
        assert response.status_code == 200
        assert response.json()["rows"] == [{"start": "p0", "centre": "p01"}]

    async def test_unknown_name(self, client: AsyncClient):
        response = await client.post("/api/v1/spaces/validate", json={"space": "/etc/hosts"})
        assert response.status_code == 400
        data = response.json()
        assert data["error"] == "document"
        assert "p1_model" in data["bundled"]

    async def test_missing_field(self, client: AsyncClient):
        response = await client.post("/api/v1/spaces/validate", json={})
        assert response.status_code == 422


class TestCohomologyEndpoints:
    """Twist cohomology and diagram cohomology."""

    async def test_projective_twist(self, client: AsyncClient):
        response = await client.get("/api/v1/cohomology/pn", params={"n": 2, "twist": -3})
        assert response.status_code == 200
        rows = response.json()["rows"]
        assert {"degree": -3, "i": 2, "dim": 1} in rows

    async def test_window(self, client: AsyncClient):
        response = await client.get(
            "/api/v1/cohomology/pn", params={"n": 1, "twist": 0, "low": -2, "high": 2}
        )
        assert response.status_code == 200
        assert len(response.json()["rows"]) == 10

    async def test_dimension_bound(self, client: AsyncClient):
        response = await client.get("/api/v1/cohomology/pn", params={"n": 9, "twist": 0})
        assert response.status_code == 422

    async def test_diagram(self, client: AsyncClient):
        response = await client.post(
            "/api/v1/cohomology/diagram", json={"space": "p1_model", "diagram": "p01_only"}
        )
        assert response.status_code == 200
        assert response.json()["rows"] == [{"i": 0, "dim": 0}, {"i": 1, "dim": 1}]
