from fastapi import FastAPI, HTTPException
from pydantic import BaseModel
from contextlib import asynccontextmanager
from typing import List, Optional
from src.benchgen.fidelity import FidelitySpec
from src.config.logging import setup_logging, get_logger
from src.config.settings import get_settings
from src.errors import BenchError, ConfigError
from src.harness.benchmarks import resolve_benchmark
from src.harness.service import EvalService

# Setup logging
setup_logging()
logger = get_logger(__name__)


class EvalRequest(BaseModel):
    z: List[float]
    fidelity: Optional[FidelitySpec] = None


class EvalResponse(BaseModel):
    loss: float
    raw_loss: float
    cost_units: int
    clipped: bool


# Global service instance
service: Optional[EvalService] = None


def build_service() -> EvalService:
    """Service for the benchmark named by $WLASSO_BENCHMARK."""
    settings = get_settings()
    if not settings.benchmark:
        raise ConfigError("set WLASSO_BENCHMARK to the benchmark to serve")
    return EvalService(resolve_benchmark(settings.benchmark, data_dir=settings.data_dir))


@asynccontextmanager
async def lifespan(app: FastAPI):
    # Startup: load the benchmark unless one was injected
    global service
    logger.info("Starting FastAPI application...")
    if service is None:
        service = build_service()
    logger.info(f"Serving benchmark {service.bench.name} (d={service.bench.d})")
    yield
    logger.info("Shutting down application...")


app = FastAPI(lifespan=lifespan)


@app.get("/api/v1/info")
def info():
    """Benchmark name, dimension, search bounds and fidelity schedule."""
    return service.info()


@app.post("/api/v1/eval", response_model=EvalResponse)
def evaluate(request: EvalRequest):
    """Evaluate one search-space point."""
    logger.debug(f"Received eval request (d={len(request.z)})")
    if len(request.z) != service.bench.d:
        raise HTTPException(
            status_code=422,
            detail={"error": "dimension", "expected": service.bench.d,
                    "message": f"point must have {service.bench.d} coordinates, got {len(request.z)}"},
        )
    try:
        return service.evaluate(request.z, request.fidelity)
    except BenchError as exc:
        logger.error(f"Evaluation failed: {exc}")
        status_code = 422 if isinstance(exc, ConfigError) else 500
        raise HTTPException(status_code=status_code, detail={"error": exc.code, "message": str(exc)})
