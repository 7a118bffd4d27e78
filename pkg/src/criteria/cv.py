"""
K-fold cross-validation outer objective.

The loss of a penalty vector is the mean, over folds, of the validation MSE
of the weighted-Lasso fit on the training rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from src.config.logging import get_logger
from src.errors import ConfigError
from src.lasso.dataset import Dataset, as_coef, as_penalty
from src.lasso.solver import SolverConfig, WLassoSolution, cd_cost_meter, solve_wlasso

logger = get_logger(__name__)

# below this the reference loss is treated as zero and scaling is disabled
REFERENCE_FLOOR = 1e-12


class CvConfig(BaseModel):
    k_folds: int = Field(default=5, ge=2)
    fold_seed: int = 0
    tol: float = Field(default=1e-4, gt=0.0, le=1.0)


@dataclass(frozen=True)
class CvFold:
    train_idx: np.ndarray
    val_idx: np.ndarray
    train: Dataset
    X_val: np.ndarray
    y_val: np.ndarray


@dataclass(frozen=True)
class CvSplit:
    """Folds of one dataset, materialized once and reused for every lambda."""

    folds: tuple[CvFold, ...]
    config: CvConfig

    @property
    def k(self) -> int:
        return len(self.folds)


@dataclass(frozen=True)
class CriterionValue:
    loss: float
    per_fold: np.ndarray
    cost: int
    scaled: Optional[float] = None
    solutions: tuple[WLassoSolution, ...] = field(default=(), repr=False)

    @property
    def objective(self) -> float:
        """The scaled loss when available, else the raw CV loss."""
        return self.scaled if self.scaled is not None else self.loss

    @property
    def betas(self) -> list[np.ndarray]:
        return [sol.beta for sol in self.solutions]


def make_folds(n: int, cfg: CvConfig) -> list[tuple[np.ndarray, np.ndarray]]:
    """
    Shuffle 0..n-1 with a PCG64 stream seeded by fold_seed, then cut the
    permutation into K contiguous blocks (the first n % K blocks get one extra
    row). Indices inside each block are sorted.
    """
    if cfg.k_folds > n:
        raise ConfigError(f"k_folds={cfg.k_folds} exceeds the number of samples n={n}")
    rng = np.random.Generator(np.random.PCG64(cfg.fold_seed))
    perm = rng.permutation(n)
    everything = np.arange(n)
    folds = []
    for block in np.array_split(perm, cfg.k_folds):
        val = np.sort(block)
        if val.size == 0:
            raise ConfigError("empty validation fold")
        train = np.setdiff1d(everything, val, assume_unique=True)
        folds.append((train, val))
    return folds


def make_split(ds: Dataset, cfg: CvConfig) -> CvSplit:
    folds = []
    for k, (train_idx, val_idx) in enumerate(make_folds(ds.n, cfg)):
        val = ds.take_rows(val_idx)
        X_val = val.X
        folds.append(CvFold(
            train_idx=train_idx,
            val_idx=val_idx,
            train=ds.take_rows(train_idx, name=f"{ds.name}[fold {k}]"),
            X_val=X_val,
            y_val=val.y,
        ))
    return CvSplit(folds=tuple(folds), config=cfg)


def validation_mse(fold: CvFold, beta: np.ndarray) -> float:
    resid = fold.y_val - np.asarray(fold.X_val @ beta).ravel()
    return float(resid @ resid) / fold.y_val.shape[0]


def scale_loss(loss: float, reference: Optional[float]) -> Optional[float]:
    if reference is None or reference < REFERENCE_FLOOR:
        return None
    return loss / reference


def cv_loss(
    ds: Dataset,
    lam,
    cfg: CvConfig | None = None,
    *,
    split: CvSplit | None = None,
    reference: Optional[float] = None,
    warm_starts: Optional[Sequence[Optional[np.ndarray]]] = None,
    tol: Optional[float] = None,
) -> CriterionValue:
    """
    Cross-validation MSE of the weighted Lasso at `lam`.

    `split` reuses precomputed folds (it must come from `ds`); `warm_starts`
    gives one optional initial beta per fold; `tol` overrides cfg.tol.
    """
    cfg = cfg or (split.config if split is not None else CvConfig())
    split = split or make_split(ds, cfg)
    lam = as_penalty(lam, ds.d)
    solver_tol = tol if tol is not None else cfg.tol
    if warm_starts is not None and len(warm_starts) != split.k:
        raise ConfigError(f"expected {split.k} warm starts, got {len(warm_starts)}")

    per_fold = np.empty(split.k)
    cost = 0
    solutions = []
    for k, fold in enumerate(split.folds):
        warm = warm_starts[k] if warm_starts is not None else None
        sol = solve_wlasso(fold.train, lam, SolverConfig(tol=solver_tol, warm_start=warm))
        per_fold[k] = validation_mse(fold, sol.beta)
        cost += cd_cost_meter(sol, fold.train)
        solutions.append(sol)

    loss = float(np.mean(per_fold))
    return CriterionValue(
        loss=loss,
        per_fold=per_fold,
        cost=cost,
        scaled=scale_loss(loss, reference),
        solutions=tuple(solutions),
    )


def fixed_beta_loss(split: CvSplit, beta, reference: Optional[float] = None) -> CriterionValue:
    """CV MSE of a fixed coefficient vector used on every validation fold (no solve)."""
    beta = np.asarray(beta, dtype=np.float64)
    per_fold = np.array([validation_mse(fold, as_coef(beta, fold.train.d)) for fold in split.folds])
    loss = float(np.mean(per_fold))
    return CriterionValue(loss=loss, per_fold=per_fold, cost=0, scaled=scale_loss(loss, reference))


def reference_loss(bench) -> float:
    """CV MSE of the ground-truth coefficients of a synthetic benchmark."""
    if bench.beta_true is None:
        raise ConfigError(f"benchmark {bench.name} has no ground-truth coefficients")
    return fixed_beta_loss(bench.cv_split, bench.beta_true).loss
