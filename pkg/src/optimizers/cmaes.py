"""
(mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates and
cumulative step-size adaptation.

Strategy parameters are the standard defaults (mu = lambda / 2, positive
log-linear recombination weights). The eigendecomposition of C is refreshed
lazily, every `lazy_gap` evaluations, and its eigenvalues are floored at
EIG_FLOOR so C stays positive definite.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from src.benchgen.benchmark import Benchmark
from src.benchgen.bounds import default_init
from src.benchgen.fidelity import FidelitySpec
from src.config.logging import get_logger
from src.errors import ConfigError, SolverError
from src.harness.evaluator import Evaluator
from src.harness.records import EvalRecord
from src.optimizers.base import AskTellOptimizer, run_ask_tell

logger = get_logger(__name__)

EIG_FLOOR = 1e-14


class CmaConfig(BaseModel):
    population: int = Field(default=20, ge=2)
    sigma0: float = Field(default=0.1, gt=0.0)
    max_resamples: int = Field(default=10, ge=0)


class CmaEs(AskTellOptimizer):
    def __init__(self, mean, cfg: Optional[CmaConfig] = None, seed: int = 0):
        mean = np.asarray(mean, dtype=np.float64)
        super().__init__(mean.shape[0], seed)
        cfg = cfg or CmaConfig()
        self.cfg = cfg
        N = self.d

        # selection
        self.lam = cfg.population
        self.mu = self.lam // 2
        weights = math.log(self.lam / 2 + 0.5) - np.log(np.arange(1, self.mu + 1))
        self.weights = weights / weights.sum()
        self.mueff = 1.0 / float(self.weights @ self.weights)

        # adaptation
        self.cc = (4 + self.mueff / N) / (N + 4 + 2 * self.mueff / N)
        self.cs = (self.mueff + 2) / (N + self.mueff + 5)
        self.c1 = 2 / ((N + 1.3) ** 2 + self.mueff)
        self.cmu = min(1 - self.c1, 2 * (self.mueff - 2 + 1 / self.mueff) / ((N + 2) ** 2 + self.mueff))
        self.damps = 2 * self.mueff / self.lam + 0.3 + self.cs
        self.lazy_gap = 0.5 * N * self.lam / (self.c1 + self.cmu) / N ** 2

        # state
        self.mean = mean.copy()
        self.sigma = cfg.sigma0
        self.pc = np.zeros(N)
        self.ps = np.zeros(N)
        self.C = np.eye(N)
        self.eigenbasis = np.eye(N)
        self.eigenvalues = np.ones(N)
        self.invsqrt = np.eye(N)
        self.counteval = 0
        self.updated_eval = 0
        self.generation = 0
        self.flagged = 0

    def _update_eigensystem(self) -> None:
        if self.counteval <= self.updated_eval + self.lazy_gap:
            return
        self.C = (self.C + self.C.T) / 2
        values, vectors = np.linalg.eigh(self.C)
        if not np.all(np.isfinite(values)):
            raise SolverError("CMA-ES covariance has non-finite eigenvalues")
        if values.min() < EIG_FLOOR:
            self.flagged += 1
            logger.warning(
                "CMA-ES covariance eigenvalue %.3e floored to %.0e at generation %d",
                values.min(), EIG_FLOOR, self.generation,
            )
            values = np.maximum(values, EIG_FLOOR)
            self.C = (vectors * values) @ vectors.T
        self.eigenvalues = values
        self.eigenbasis = vectors
        self.invsqrt = (vectors / np.sqrt(values)) @ vectors.T
        self.updated_eval = self.counteval

    def _sample(self) -> np.ndarray:
        z = self.rng.standard_normal(self.d)
        return self.mean + self.sigma * (self.eigenbasis @ (np.sqrt(self.eigenvalues) * z))

    def ask(self) -> np.ndarray:
        """Sample the population; out-of-bounds candidates are redrawn up to max_resamples times."""
        self._update_eigensystem()
        assert self.eigenvalues.min() >= EIG_FLOOR
        points = np.empty((self.lam, self.d))
        for k in range(self.lam):
            x = self._sample()
            for _ in range(self.cfg.max_resamples):
                if np.all(np.abs(x) <= 1.0):
                    break
                x = self._sample()
            points[k] = x
        return points

    def tell(self, points: np.ndarray, losses: Sequence[float]) -> None:
        points = np.asarray(points, dtype=np.float64)
        losses = np.asarray(losses, dtype=np.float64)
        if points.shape != (self.lam, self.d) or losses.shape != (self.lam,):
            raise ConfigError(f"tell expects {self.lam} points of dimension {self.d} and as many losses")
        N = self.d
        self.counteval += self.lam
        self.generation += 1

        # stable sort: equal losses keep ask order
        parents = points[np.argsort(losses, kind="stable")[: self.mu]]
        old = self.mean
        self.mean = self.weights @ parents

        y = self.mean - old
        z = self.invsqrt @ y
        self.ps = (1 - self.cs) * self.ps + math.sqrt(self.cs * (2 - self.cs) * self.mueff) / self.sigma * z
        ps_sq = float(self.ps @ self.ps)
        hsig = ps_sq / N / (1 - (1 - self.cs) ** (2 * self.counteval / self.lam)) < 2 + 4.0 / (N + 1)
        self.pc = (1 - self.cc) * self.pc + math.sqrt(self.cc * (2 - self.cc) * self.mueff) / self.sigma * hsig * y

        c1a = self.c1 * (1 - (1 - hsig ** 2) * self.cc * (2 - self.cc))
        self.C *= 1 - c1a - self.cmu * float(self.weights.sum())
        self.C += self.c1 * np.outer(self.pc, self.pc)
        steps = (parents - old) / self.sigma
        self.C += self.cmu * (steps.T * self.weights) @ steps

        self.sigma *= math.exp(min(1.0, self.cs / self.damps * (ps_sq / N - 1) / 2))


def cmaes(
    bench: Benchmark,
    budget: int,
    cfg: Optional[CmaConfig] = None,
    seed: int = 0,
    fidelity: Optional[FidelitySpec] = None,
    evaluator: Optional[Evaluator] = None,
) -> list[EvalRecord]:
    """CMA-ES started at the default configuration."""
    cfg = cfg or CmaConfig()
    if budget < cfg.population:
        raise ConfigError(f"budget={budget} is smaller than the population {cfg.population}")
    evaluator = evaluator or Evaluator(bench, method="cmaes", seed=seed)
    optimizer = CmaEs(default_init(bench), cfg, seed)
    records = run_ask_tell(optimizer, evaluator, budget, fidelity)
    if optimizer.flagged:
        logger.warning("CMA-ES floored covariance eigenvalues %d time(s) on %s", optimizer.flagged, bench.name)
    return records
