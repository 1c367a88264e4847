import random
from typing import AsyncGenerator, List

import pytest
from httpx import ASGITransport, AsyncClient

from workbench.algebra.rings import PresentedRing
from workbench.cli import main
from workbench.geometry.builders import build_p1_charts, build_pn_model, build_point
from workbench.main import app
from workbench.services.io_service import DocumentLoader

FUZZ_SEED = 20240917


@pytest.fixture
async def client() -> AsyncGenerator[AsyncClient, None]:
    """Test client bound to the ASGI app."""
    transport = ASGITransport(app=app)
    async with AsyncClient(transport=transport, base_url="http://test") as ac:
        yield ac


@pytest.fixture
def loader() -> DocumentLoader:
    return DocumentLoader()


@pytest.fixture(scope="session")
def p1():
    """Chart model of P^1: p0 = QQ[u], p1 = QQ[v], p01 = QQ[u,w]/(uw - 1)."""
    return build_p1_charts()


@pytest.fixture(scope="session")
def p1_homogeneous():
    return build_pn_model(1)


@pytest.fixture(scope="session")
def p2():
    return build_pn_model(2)


@pytest.fixture(scope="session")
def point():
    return build_point()


@pytest.fixture
def qx() -> PresentedRing:
    return PresentedRing(["x"])


@pytest.fixture
def rng() -> random.Random:
    return random.Random(FUZZ_SEED)


@pytest.fixture
def run_cli(capsys):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""

    def run(args: List[str]):
        try:
            code = main(args)
        except SystemExit as e:
            code = e.code
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run
