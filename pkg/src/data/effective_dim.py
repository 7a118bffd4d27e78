"""
Effective-dimension estimate: ||beta||_0 of the full-data refit at the
penalty Sparse-HO selects.
"""
from src.baselines.sparse_ho import SparseHoConfig, sparse_ho
from src.benchgen.benchmark import Benchmark
from src.config.logging import get_logger
from src.errors import ConfigError

logger = get_logger(__name__)

DEFAULT_BUDGET = 100


def estimate_effective_dim(bench: Benchmark, budget: int = DEFAULT_BUDGET, cfg: SparseHoConfig | None = None) -> int:
    if budget < 1:
        raise ConfigError(f"budget must be >= 1 to estimate the effective dimension, got {budget}")
    cfg = (cfg or SparseHoConfig()).model_copy(update={"max_outer_iters": budget})
    result = sparse_ho(bench, cfg)
    logger.info("estimated effective dimension of %s: %d", bench.name, result.effective_dim)
    return result.effective_dim
