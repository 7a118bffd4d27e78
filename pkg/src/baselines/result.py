"""
Common result type of the Lasso baselines.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.benchgen.benchmark import Benchmark
from src.errors import ConfigError
from src.harness.evaluator import Evaluator
from src.harness.records import EvalRecord
from src.lasso.solver import SolverConfig, WLassoSolution, solve_wlasso


@dataclass(frozen=True)
class BaselineResult:
    best_lam: np.ndarray
    best_loss: float
    trajectory: list[EvalRecord]
    refit_beta: np.ndarray

    @property
    def n_evals(self) -> int:
        return len(self.trajectory)

    @property
    def effective_dim(self) -> int:
        """||beta||_0 of the full-data refit."""
        return int(np.count_nonzero(self.refit_beta))


def refit(bench: Benchmark, lam, tol: float) -> WLassoSolution:
    """Weighted-Lasso solution on the full dataset at `lam`."""
    return solve_wlasso(bench.dataset, lam, SolverConfig(tol=tol))


def result_from(evaluator: Evaluator, refit_beta: np.ndarray | None = None, tol: float | None = None) -> BaselineResult:
    """
    Package the evaluator's best record. Without `refit_beta` the full-data
    refit is solved at the best lambda with tolerance `tol`.
    """
    index = evaluator.best_index
    if index is None:
        raise ConfigError(f"{evaluator.method or 'baseline'} evaluated no configuration")
    best_lam = evaluator.lams[index]
    if refit_beta is None:
        refit_beta = refit(evaluator.bench, best_lam, tol if tol is not None else evaluator.records[index].tol).beta
    return BaselineResult(
        best_lam=best_lam,
        best_loss=evaluator.records[index].loss,
        trajectory=list(evaluator.records),
        refit_beta=refit_beta,
    )
