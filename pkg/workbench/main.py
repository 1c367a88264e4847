import time
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.gzip import GZipMiddleware
from fastapi.responses import JSONResponse

from workbench.api import cohomology, spaces
from workbench.core.config import settings
from workbench.core.errors import WorkbenchError
from workbench.core.logging import configure_logging

logger = configure_logging()


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan manager"""
    logger.info("Starting workbench API", version=settings.VERSION, threads=settings.THREADS)
    yield
    logger.info("Shutting down workbench API")


app = FastAPI(
    title=settings.APP_NAME,
    description="""
    **Workbench API** - schematic finite spaces over QQ

    * **Spaces** - validate bundled or inline spaces, check schematicity, compute centres
    * **Cohomology** - O(d) on the finite model of P^n, cohomology of finite diagrams

    Space and diagram documents use the same YAML/JSON layout as the CLI.
    """,
    version=settings.VERSION,
    lifespan=lifespan,
)


@app.middleware("http")
async def add_process_time_header(request: Request, call_next):
    start_time = time.time()
    response = await call_next(request)
    response.headers["X-Process-Time"] = str(time.time() - start_time)
    return response


app.add_middleware(GZipMiddleware, minimum_size=1000)

app.include_router(spaces.router, prefix="/api/v1/spaces", tags=["Spaces"])
app.include_router(cohomology.router, prefix="/api/v1/cohomology", tags=["Cohomology"])


@app.exception_handler(WorkbenchError)
async def workbench_exception_handler(request: Request, exc: WorkbenchError):
    logger.warning(
        "Workbench error",
        path=request.url.path,
        method=request.method,
        error=exc.kind,
        message=exc.message,
    )
    return JSONResponse(status_code=status.HTTP_400_BAD_REQUEST, content=exc.to_dict())


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    logger.warning(
        "Validation error",
        path=request.url.path,
        method=request.method,
        errors=len(exc.errors()),
    )
    errors = [
        {"loc": list(err["loc"]), "msg": err["msg"], "type": err["type"]} for err in exc.errors()
    ]
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": "Validation error", "errors": errors},
    )


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    logger.error(
        "Unhandled exception",
        path=request.url.path,
        method=request.method,
        error=str(exc),
        error_type=type(exc).__name__,
    )
    content = {"detail": "Internal server error"}
    if settings.DEBUG:
        content.update(error=str(exc), type=type(exc).__name__)
    return JSONResponse(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, content=content)


@app.get("/", include_in_schema=False)
@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {
        "status": "healthy",
        "service": settings.APP_NAME,
        "version": settings.VERSION,
        "timestamp": time.time(),
    }
