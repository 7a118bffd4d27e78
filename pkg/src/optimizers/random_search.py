from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from src.benchgen.benchmark import Benchmark
from src.benchgen.fidelity import FidelitySpec
from src.harness.evaluator import Evaluator
from src.harness.records import EvalRecord
from src.optimizers.base import AskTellOptimizer, run_ask_tell


class RandomSearch(AskTellOptimizer):
    """I.i.d. uniform points in [-1, 1]^d, one per ask."""

    def ask(self) -> np.ndarray:
        return self.rng.uniform(-1.0, 1.0, size=(1, self.d))

    def tell(self, points: np.ndarray, losses: Sequence[float]) -> None:
        pass


def random_search(
    bench: Benchmark,
    budget: int,
    fidelity: Optional[FidelitySpec] = None,
    seed: int = 0,
    evaluator: Optional[Evaluator] = None,
) -> list[EvalRecord]:
    evaluator = evaluator or Evaluator(bench, method="random_search", seed=seed)
    return run_ask_tell(RandomSearch(bench.d, seed), evaluator, budget, fidelity)
