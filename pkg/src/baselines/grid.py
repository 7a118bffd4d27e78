"""
LassoCV: grid search over a single shared penalty.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.baselines.result import BaselineResult, result_from
from src.benchgen.benchmark import Benchmark
from src.config.logging import get_logger
from src.harness.evaluator import Evaluator

logger = get_logger(__name__)

DEFAULT_GRID_POINTS = 100


class GridSpec(BaseModel):
    """Scalar lambda grid on the natural-log scale, evenly spaced in lambda."""

    n_points: int = Field(default=DEFAULT_GRID_POINTS, ge=1)
    lo: float
    hi: float

    @model_validator(mode="after")
    def _ordered(self):
        if self.n_points == 1:
            if self.lo != self.hi:
                raise ValueError("a one-point grid needs lo == hi")
        elif not self.lo < self.hi:
            raise ValueError(f"grid needs lo < hi, got lo={self.lo}, hi={self.hi}")
        return self

    @classmethod
    def for_benchmark(cls, bench: Benchmark, n_points: int = DEFAULT_GRID_POINTS) -> "GridSpec":
        return cls(n_points=n_points, lo=bench.lam_min, hi=bench.lam_max)

    @classmethod
    def single(cls, value: float) -> "GridSpec":
        return cls(n_points=1, lo=value, hi=value)

    def points(self) -> np.ndarray:
        """Grid values, largest first."""
        return np.linspace(self.lo, self.hi, self.n_points)[::-1]


def check_grid(bench: Benchmark, grid: GridSpec) -> None:
    if grid.lo < bench.lam_min or grid.hi > bench.lam_max:
        logger.warning(
            "grid [%g, %g] leaves the bounds [%g, %g] of %s",
            grid.lo, grid.hi, bench.lam_min, bench.lam_max, bench.name,
        )


def lasso_cv(
    bench: Benchmark,
    grid: Optional[GridSpec] = None,
    tol: Optional[float] = None,
    evaluator: Optional[Evaluator] = None,
) -> BaselineResult:
    """
    Evaluate the CV loss at lambda_j = g for every grid point g, from the
    largest g down, warm-starting each fold from the previous grid point.
    """
    grid = grid or GridSpec.for_benchmark(bench)
    check_grid(bench, grid)
    tol = tol if tol is not None else bench.fidelity.default.tolerance
    evaluator = evaluator or Evaluator(bench, method="lasso_cv")

    warm = None
    for g in grid.points():
        evaluation = evaluator.evaluate_lam(np.full(bench.d, g), tol, warm_starts=warm)
        warm = evaluation.value.betas

    result = result_from(evaluator, tol=tol)
    logger.info("lasso_cv on %s: best loss %.6g at lambda=%.4f", bench.name, result.best_loss, result.best_lam[0])
    return result
