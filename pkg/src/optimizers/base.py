"""
Ask/tell interface shared by the sampling optimizers and the loop that runs
one against a benchmark.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np

from src.benchgen.fidelity import FidelitySpec
from src.config.logging import get_logger
from src.errors import ConfigError
from src.harness.evaluator import Evaluator
from src.harness.records import EvalRecord

logger = get_logger(__name__)


class AskTellOptimizer(ABC):
    """
    Minimizer over [-1, 1]^d driven from outside: ask() proposes a batch,
    tell() receives the losses of exactly that batch in the same order.
    """

    def __init__(self, d: int, seed: int = 0):
        if d < 1:
            raise ConfigError(f"dimension must be >= 1, got {d}")
        self.d = d
        self.seed = seed
        self.rng = np.random.Generator(np.random.PCG64(seed))

    @abstractmethod
    def ask(self) -> np.ndarray:
        """Batch of candidate points, shape (batch, d)."""

    @abstractmethod
    def tell(self, points: np.ndarray, losses: Sequence[float]) -> None:
        """Update the state with the losses of the last asked batch."""


def run_ask_tell(
    optimizer: AskTellOptimizer,
    evaluator: Evaluator,
    budget: int,
    fidelity: Optional[FidelitySpec] = None,
) -> list[EvalRecord]:
    """
    Evaluate asked batches until `budget` evaluations are spent. Points are
    clipped to [-1, 1]^d for evaluation while the optimizer is told the point
    it proposed. A batch cut short by the budget is evaluated but not told.
    """
    if budget < 1:
        raise ConfigError(f"budget must be >= 1, got {budget}")
    while evaluator.n_evals < budget:
        points = np.atleast_2d(optimizer.ask())
        remaining = budget - evaluator.n_evals
        batch = points[:remaining]
        losses = [evaluator.evaluate(z, fidelity).record.loss for z in batch]
        if len(batch) == len(points):
            optimizer.tell(points, losses)
    best = evaluator.best
    logger.info(
        "%s on %s finished: %d evaluations, best loss %.6g",
        evaluator.method, evaluator.bench.name, evaluator.n_evals, best.loss,
    )
    return list(evaluator.records)
