"""
Sparse-HO: first-order descent on the CV loss in lambda, with hypergradients
from implicit differentiation restricted to the support of each fold's fit.

On the support S of the inner solution the optimality conditions read
X_S^T (X_S beta_S - y) / n + exp(lam_S) * sign(beta_S) = 0, so
d beta_S / d lam_S = -n (X_S^T X_S)^{-1} diag(exp(lam_S) * sign(beta_S))
and every derivative involving a feature outside S is zero.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from pydantic import BaseModel, Field

from src.baselines.result import BaselineResult, result_from
from src.benchgen.benchmark import Benchmark
from src.benchgen.bounds import default_init, from_search_space
from src.config.logging import get_logger
from src.criteria.cv import CriterionValue, CvFold, scale_loss, validation_mse
from src.errors import ConfigError, DimensionError
from src.harness.evaluator import Evaluator, evaluate_lam
from src.lasso.dataset import as_penalty
from src.lasso.solver import SolverConfig, WLassoSolution, cd_cost_meter, solve_wlasso

logger = get_logger(__name__)

# relative ridge added to X_S^T X_S when it cannot be factorized
RIDGE = 1e-10


class StepRule(BaseModel):
    """Backtracking (Armijo) line search."""

    initial: float = Field(default=1.0, gt=0.0)
    shrink: float = Field(default=0.5, gt=0.0, lt=1.0)
    slope: float = Field(default=1e-4, gt=0.0, lt=1.0)
    max_halvings: int = Field(default=30, ge=0)
    min_step: float = Field(default=1e-10, gt=0.0)


class SparseHoConfig(BaseModel):
    init: Optional[list[float]] = None  # search-space point; None means default_init
    max_outer_iters: int = Field(default=100, ge=1)
    restart_period: int = Field(default=20, ge=1)
    step_rule: StepRule = Field(default_factory=StepRule)
    inner_tol: float = Field(default=1e-4, gt=0.0, le=1.0)
    stability_check: bool = True


@dataclass(frozen=True)
class HyperGradient:
    loss: float
    grad: np.ndarray
    value: CriterionValue
    flagged: int = 0


def _solve_support_system(A: np.ndarray, rhs: np.ndarray, n_train: int) -> tuple[np.ndarray, bool]:
    """Solve A u = rhs for the SPD Gram matrix A; falls back to a ridge-regularized solve."""
    size = A.shape[0]
    if size <= n_train:
        try:
            factor = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
            return scipy.linalg.cho_solve(factor, rhs, check_finite=False), False
        except np.linalg.LinAlgError:
            pass
    ridge = RIDGE * max(float(np.trace(A)) / size, 1.0)
    u = scipy.linalg.solve(A + ridge * np.eye(size), rhs, assume_a="pos", check_finite=False)
    return u, True


def _stable_solution(
    fold: CvFold,
    lam: np.ndarray,
    sol: WLassoSolution,
    tol: float,
) -> tuple[WLassoSolution, int]:
    """
    Re-solve warm-started at a tenfold tighter tolerance; if the support moves,
    solve once more at a further tenfold tighter tolerance. Returns the
    solution to differentiate and the extra cost.
    """
    check = solve_wlasso(fold.train, lam, SolverConfig(tol=tol / 10, warm_start=sol.beta))
    cost = cd_cost_meter(check, fold.train)
    if np.array_equal(check.support, sol.support):
        return check, cost
    logger.debug("support changed between consecutive solves on %s; tightening to %g", fold.train.name, tol / 100)
    tighter = solve_wlasso(fold.train, lam, SolverConfig(tol=tol / 100, warm_start=check.beta))
    return tighter, cost + cd_cost_meter(tighter, fold.train)


def _fold_gradient(fold: CvFold, lam: np.ndarray, beta: np.ndarray) -> tuple[np.ndarray, bool]:
    grad = np.zeros(lam.shape[0])
    support = np.flatnonzero(beta)
    if support.size == 0:
        return grad, False
    beta_s = beta[support]
    X_s = fold.train.columns(support)
    X_val_s = fold.X_val[:, support]
    X_val_s = X_val_s.toarray() if hasattr(X_val_s, "toarray") else np.asarray(X_val_s)

    resid = X_val_s @ beta_s - fold.y_val
    dloss = (2.0 / fold.y_val.shape[0]) * (X_val_s.T @ resid)
    u, flagged = _solve_support_system(X_s.T @ X_s, dloss, fold.train.n)
    grad[support] = -fold.train.n * np.exp(lam[support]) * np.sign(beta_s) * u
    return grad, flagged


def hypergradient(
    bench: Benchmark,
    lam,
    cfg: Optional[SparseHoConfig] = None,
    solutions: Optional[Sequence[WLassoSolution]] = None,
    warm_starts: Optional[Sequence[Optional[np.ndarray]]] = None,
) -> HyperGradient:
    """
    CV loss and its gradient in lambda. `solutions` reuses inner fits already
    computed at `lam` (one per fold); `warm_starts` seeds fresh solves.
    """
    cfg = cfg or SparseHoConfig()
    lam = as_penalty(lam, bench.d)
    split = bench.cv_split
    if solutions is None:
        value = evaluate_lam(bench, lam, cfg.inner_tol, warm_starts)
        solutions, cost = value.solutions, value.cost
    else:
        cost = 0

    grad = np.zeros(bench.d)
    per_fold = np.empty(split.k)
    used = []
    flagged = 0
    for k, fold in enumerate(split.folds):
        sol = solutions[k]
        per_fold[k] = validation_mse(fold, sol.beta)
        if cfg.stability_check:
            sol, extra = _stable_solution(fold, lam, sol, cfg.inner_tol)
            cost += extra
        fold_grad, fold_flagged = _fold_gradient(fold, lam, sol.beta)
        grad += fold_grad
        flagged += int(fold_flagged)
        used.append(sol)
    grad /= split.k

    if flagged:
        logger.warning("regularized support solve on %d fold(s) of %s", flagged, bench.name)
    loss = float(np.mean(per_fold))
    value = CriterionValue(
        loss=loss,
        per_fold=per_fold,
        cost=cost,
        scaled=scale_loss(loss, bench.reference),
        solutions=tuple(used),
    )
    return HyperGradient(loss=loss, grad=grad, value=value, flagged=flagged)


def sparse_ho_gradient(bench: Benchmark, lam, cfg: Optional[SparseHoConfig] = None) -> tuple[float, np.ndarray]:
    """(CV loss, d loss / d lambda) at `lam`."""
    hg = hypergradient(bench, lam, cfg)
    return hg.loss, hg.grad


def _start_point(bench: Benchmark, cfg: SparseHoConfig) -> np.ndarray:
    if cfg.init is None:
        z = default_init(bench)
    else:
        z = np.asarray(cfg.init, dtype=np.float64)
        if z.shape != (bench.d,):
            raise DimensionError(f"init must have {bench.d} coordinates, got shape {z.shape}", expected=bench.d)
    lam, _ = from_search_space(bench, z)
    return lam


def _descend(bench: Benchmark, evaluator: Evaluator, lam: np.ndarray, n_iters: int, cfg: SparseHoConfig) -> str:
    """
    One descent leg of at most `n_iters` recorded iterates. Line-search trials
    are not recorded; their cost is charged to the next recorded iterate.
    Returns why the leg ended: "budget", "stationary" or "collapse".
    """
    rule = cfg.step_rule
    tol = cfg.inner_tol
    lam = np.clip(lam, bench.lam_min, bench.lam_max)
    solutions = None
    pending = 0

    for it in range(n_iters):
        start_ns = time.perf_counter_ns()
        hg = hypergradient(bench, lam, cfg, solutions=solutions)
        evaluator.record(lam, hg.value, tol, wall_ns=time.perf_counter_ns() - start_ns, extra_cost=pending)
        pending = 0
        if it == n_iters - 1:
            return "budget"
        if not np.any(hg.grad):
            return "stationary"

        step = rule.initial
        accepted = None
        for _ in range(rule.max_halvings + 1):
            candidate = np.clip(lam - step * hg.grad, bench.lam_min, bench.lam_max)
            move = candidate - lam
            if not np.any(move):
                break
            trial = evaluate_lam(bench, candidate, tol, hg.value.betas)
            pending += trial.cost
            if trial.loss <= hg.loss + rule.slope * float(hg.grad @ move):
                accepted = (candidate, trial)
                break
            step *= rule.shrink
            if step < rule.min_step:
                break
        if accepted is None:
            logger.debug("line search collapsed after %d iterates on %s", it + 1, bench.name)
            return "collapse"
        lam, trial = accepted
        solutions = trial.solutions
    return "budget"


def sparse_ho(bench: Benchmark, cfg: Optional[SparseHoConfig] = None, evaluator: Optional[Evaluator] = None) -> BaselineResult:
    """Single descent leg from cfg.init, at most cfg.max_outer_iters iterates."""
    cfg = cfg or SparseHoConfig()
    evaluator = evaluator or Evaluator(bench, method="sparse_ho")
    reason = _descend(bench, evaluator, _start_point(bench, cfg), cfg.max_outer_iters, cfg)
    result = result_from(evaluator, tol=cfg.inner_tol)
    logger.info("sparse_ho on %s stopped (%s) after %d iterates: best loss %.6g",
                bench.name, reason, result.n_evals, result.best_loss)
    return result


def multi_start_sparse_ho(
    bench: Benchmark,
    cfg: Optional[SparseHoConfig] = None,
    budget: int = 1000,
    seed: int = 0,
    evaluator: Optional[Evaluator] = None,
) -> BaselineResult:
    """
    Restarted Sparse-HO. The first leg starts at cfg.init; each later leg
    starts from a uniform lambda_j = u with u ~ U[lam_min, lam_max]. A leg ends
    after restart_period iterates or when its line search collapses.
    """
    if budget < 1:
        raise ConfigError(f"budget must be >= 1, got {budget}")
    cfg = cfg or SparseHoConfig()
    evaluator = evaluator or Evaluator(bench, method="multi_start_sparse_ho", seed=seed)
    rng = np.random.Generator(np.random.PCG64(seed))

    lam = _start_point(bench, cfg)
    legs = 0
    while evaluator.n_evals < budget:
        n_iters = min(cfg.restart_period, budget - evaluator.n_evals)
        _descend(bench, evaluator, lam, n_iters, cfg)
        legs += 1
        lam = np.full(bench.d, rng.uniform(bench.lam_min, bench.lam_max))

    result = result_from(evaluator, tol=cfg.inner_tol)
    logger.info("multi_start_sparse_ho on %s: %d legs, best loss %.6g", bench.name, legs, result.best_loss)
    return result
