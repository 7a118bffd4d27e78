"""
Search-space bounds for lambda and the affine map onto [-1, 1]^d.
"""
from __future__ import annotations

import math
from enum import Enum

import numpy as np

from src.config.logging import get_logger
from src.errors import ConfigError
from src.lasso.dataset import Dataset

logger = get_logger(__name__)


class BoundsKind(str, Enum):
    SYNTHETIC = "synthetic"
    REAL = "real"
    RCV1_LIKE = "rcv1-like"


LOWER_SPAN = {
    BoundsKind.SYNTHETIC: math.log(1e2),
    BoundsKind.REAL: math.log(1e5),
    BoundsKind.RCV1_LIKE: math.log(1e3),
}

DEFAULT_INIT_OFFSET = math.log(10.0)


def compute_lambda_max(ds: Dataset) -> float:
    """log(||X^T y||_inf / n): the smallest uniform penalty with an all-zero solution."""
    xty = np.abs(ds.rmatvec(ds.y))
    top = float(np.max(xty))
    if top == 0.0:
        raise ConfigError(f"X^T y is identically zero on {ds.name}; the target is degenerate")
    return math.log(top / ds.n)


def compute_bounds(ds: Dataset, kind: BoundsKind | str) -> tuple[float, float]:
    kind = BoundsKind(kind)
    lam_max = compute_lambda_max(ds)
    return lam_max - LOWER_SPAN[kind], lam_max


def _clip(values: np.ndarray, lo: float, hi: float, what: str) -> tuple[np.ndarray, bool]:
    clipped = bool(np.any(values < lo) or np.any(values > hi))
    if clipped:
        logger.debug("clipping %s to [%g, %g]", what, lo, hi)
        values = np.clip(values, lo, hi)
    return values, clipped


def to_search_space(bench, lam) -> tuple[np.ndarray, bool]:
    """lambda in [lam_min, lam_max]^d -> z in [-1, 1]^d; returns (z, clipped)."""
    lam = np.asarray(lam, dtype=np.float64)
    lam, clipped = _clip(lam, bench.lam_min, bench.lam_max, "lambda")
    z = 2.0 * (lam - bench.lam_min) / (bench.lam_max - bench.lam_min) - 1.0
    return np.clip(z, -1.0, 1.0), clipped


def from_search_space(bench, z) -> tuple[np.ndarray, bool]:
    """z in [-1, 1]^d -> lambda = lam_min + (z + 1) / 2 * (lam_max - lam_min); returns (lambda, clipped)."""
    z = np.asarray(z, dtype=np.float64)
    z, clipped = _clip(z, -1.0, 1.0, "search point")
    return bench.lam_min + (z + 1.0) / 2.0 * (bench.lam_max - bench.lam_min), clipped


def default_init(bench) -> np.ndarray:
    """Uniform lambda_j = lam_max - log(10), in search-space coordinates."""
    z, _ = to_search_space(bench, np.full(bench.d, bench.lam_max - DEFAULT_INIT_OFFSET))
    return z


def grid_step_init(bench, step: int, n_steps: int = 100) -> np.ndarray:
    """Uniform configuration at the `step`-th of `n_steps` evenly spaced lambda values (0 = lam_min)."""
    if not 0 <= step < n_steps:
        raise ConfigError(f"step must be in [0, {n_steps}), got {step}")
    value = np.linspace(bench.lam_min, bench.lam_max, n_steps)[step]
    z, _ = to_search_space(bench, np.full(bench.d, value))
    return z
