from fastmcp import FastMCP
from typing import Any, Dict, List, Optional
from src.benchgen.fidelity import FidelitySpec
from src.config.logging import get_logger
from src.config.settings import get_settings
from src.errors import ConfigError
from src.harness.benchmarks import resolve_benchmark
from src.harness.service import EvalService

logger = get_logger(__name__)

# --- Server Setup ---
mcp = FastMCP("wlasso-bench")
service: Optional[EvalService] = None


def get_service() -> EvalService:
    """The injected service, or one built for $WLASSO_BENCHMARK on first use."""
    global service
    if service is None:
        settings = get_settings()
        if not settings.benchmark:
            raise ConfigError("set WLASSO_BENCHMARK to the benchmark to serve")
        service = EvalService(resolve_benchmark(settings.benchmark, data_dir=settings.data_dir))
    return service

# These functions are NOT decorated. They are pure Python --> for testing


def _info_logic() -> Dict[str, Any]:
    return get_service().info()


def _evaluate_logic(z: List[float], discrete: Optional[int] = None, continuous: Optional[float] = None) -> Dict[str, Any]:
    request: Dict[str, Any] = {"op": "eval", "z": z}
    if discrete is not None or continuous is not None:
        request["fidelity"] = FidelitySpec(discrete=discrete, continuous=continuous).model_dump(exclude_none=True)
    response = get_service().handle(request)
    if "error" in response:
        raise ValueError(f"{response['error']}: {response['message']}")
    return response


# --- MCP TOOLS ---
# These just wrap the logic for the client.


@mcp.tool()
def info() -> Dict[str, Any]:
    """Describe the served benchmark: name, dimension, bounds and fidelities."""
    logger.info("Tool invoked: info")
    return _info_logic()


@mcp.tool()
def evaluate(z: List[float], discrete: Optional[int] = None, continuous: Optional[float] = None) -> Dict[str, Any]:
    """Evaluate a point in [-1, 1]^d at an optional fidelity (discrete 0..4 or continuous in [0, 1])."""
    logger.info(f"Tool invoked: evaluate(d={len(z)}, discrete={discrete}, continuous={continuous})")
    return _evaluate_logic(z, discrete, continuous)


if __name__ == "__main__":
    mcp.run()
