"""
AdaptiveLassoCV: iterative reweighting for the log penalty
exp(lam) * log(|beta_j| + eps), scored by cross-validation over a lambda grid.

Each reweighting step solves a weighted Lasso with
exp(lam_j) = exp(g) / (|beta_j| + eps), i.e. lam_j = g - log(|beta_j| + eps).
"""
from __future__ import annotations

import time
from typing import Optional

import numpy as np

from src.baselines.grid import GridSpec, check_grid
from src.baselines.result import BaselineResult, result_from
from src.benchgen.benchmark import Benchmark
from src.config.logging import get_logger
from src.criteria.cv import CriterionValue, scale_loss, validation_mse
from src.errors import ConfigError
from src.harness.evaluator import Evaluator
from src.lasso.dataset import Dataset
from src.lasso.solver import SolverConfig, WLassoSolution, cd_cost_meter, solve_wlasso

logger = get_logger(__name__)

DEFAULT_REWEIGHTS = 5
DEFAULT_EPS = 1e-3


def log_penalty(beta, lam, eps: float = DEFAULT_EPS) -> float:
    """sum_j exp(lam_j) * log(|beta_j| + eps)."""
    beta = np.asarray(beta, dtype=np.float64)
    lam = np.broadcast_to(np.asarray(lam, dtype=np.float64), beta.shape)
    return float(np.sum(np.exp(lam) * np.log(np.abs(beta) + eps)))


def reweighted_penalty(g: float, beta: np.ndarray, eps: float) -> np.ndarray:
    return g - np.log(np.abs(beta) + eps)


def reweight(
    ds: Dataset,
    g: float,
    start: WLassoSolution,
    n_reweight: int,
    eps: float,
    tol: float,
) -> tuple[WLassoSolution, int]:
    """Run n_reweight majorize-minimize steps from the plain-Lasso solution; returns (final, cost)."""
    sol, cost = start, 0
    for _ in range(n_reweight):
        lam = reweighted_penalty(g, sol.beta, eps)
        sol = solve_wlasso(ds, lam, SolverConfig(tol=tol, warm_start=sol.beta))
        cost += cd_cost_meter(sol, ds)
    return sol, cost


def adaptive_lasso_cv(
    bench: Benchmark,
    grid: Optional[GridSpec] = None,
    n_reweight: int = DEFAULT_REWEIGHTS,
    eps: float = DEFAULT_EPS,
    tol: Optional[float] = None,
    evaluator: Optional[Evaluator] = None,
) -> BaselineResult:
    if n_reweight < 1:
        raise ConfigError(f"n_reweight must be >= 1, got {n_reweight}")
    if not eps > 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    grid = grid or GridSpec.for_benchmark(bench)
    check_grid(bench, grid)
    tol = tol if tol is not None else bench.fidelity.default.tolerance
    evaluator = evaluator or Evaluator(bench, method="adaptive_lasso_cv")
    split = bench.cv_split

    # plain-Lasso solutions carried down the grid as warm starts
    plain: list[Optional[np.ndarray]] = [None] * split.k
    for g in grid.points():
        start_ns = time.perf_counter_ns()
        per_fold = np.empty(split.k)
        cost = 0
        finals = []
        for k, fold in enumerate(split.folds):
            base = solve_wlasso(fold.train, np.full(bench.d, g), SolverConfig(tol=tol, warm_start=plain[k]))
            plain[k] = base.beta
            final, extra = reweight(fold.train, g, base, n_reweight, eps, tol)
            cost += cd_cost_meter(base, fold.train) + extra
            per_fold[k] = validation_mse(fold, final.beta)
            finals.append(final)
        loss = float(np.mean(per_fold))
        value = CriterionValue(
            loss=loss,
            per_fold=per_fold,
            cost=cost,
            scaled=scale_loss(loss, bench.reference),
            solutions=tuple(finals),
        )
        evaluator.record(np.full(bench.d, g), value, tol, wall_ns=time.perf_counter_ns() - start_ns)

    best_g = float(evaluator.lams[evaluator.best_index][0])
    base = solve_wlasso(bench.dataset, np.full(bench.d, best_g), SolverConfig(tol=tol))
    final, _ = reweight(bench.dataset, best_g, base, n_reweight, eps, tol)
    result = result_from(evaluator, refit_beta=final.beta)
    logger.info("adaptive_lasso_cv on %s: best loss %.6g at lambda=%.4f", bench.name, result.best_loss, best_g)
    return result
