"""
Hyperband over solver-tolerance fidelities.

A resource r in [1, R] is evaluated at the continuous fidelity
l = log(r) / log(R), so r = 1 is the loosest tolerance (0.2) and r = R the
tightest (1e-4). A configuration promoted to the next rung is warm-started
from its previous rung's fold solutions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.benchgen.benchmark import Benchmark
from src.benchgen.bounds import default_init
from src.benchgen.fidelity import FidelitySpec, fidelity_from_resource
from src.config.logging import get_logger
from src.errors import ConfigError
from src.harness.evaluator import Evaluator
from src.harness.records import EvalRecord

__all__ = ["Bracket", "HyperbandPlan", "fidelity_from_resource", "hyperband", "promote"]

logger = get_logger(__name__)


@dataclass(frozen=True)
class Bracket:
    s: int
    rungs: tuple[tuple[int, float], ...]  # (n_configs, resource) per rung

    @property
    def n_configs(self) -> int:
        return self.rungs[0][0]

    @property
    def resource(self) -> float:
        return self.rungs[0][1]


class HyperbandPlan(BaseModel):
    eta: int = Field(default=3, ge=2)
    R: float = 27.0

    @model_validator(mode="after")
    def _not_degenerate(self):
        if self.R < self.eta:
            raise ValueError(f"degenerate plan: R={self.R} is smaller than eta={self.eta}")
        return self

    @property
    def s_max(self) -> int:
        """Largest s with eta**s <= R, in integer arithmetic."""
        s = 0
        while self.eta ** (s + 1) <= self.R:
            s += 1
        return s

    def brackets(self) -> list[Bracket]:
        s_max = self.s_max
        out = []
        for s in range(s_max, -1, -1):
            n = -(-((s_max + 1) * self.eta ** s) // (s + 1))
            r = self.R / self.eta ** s
            rungs = tuple((n // self.eta ** i, r * self.eta ** i) for i in range(s + 1))
            out.append(Bracket(s=s, rungs=rungs))
        return out

    def fidelity(self, resource: float) -> FidelitySpec:
        level = math.log(resource) / math.log(self.R)
        return FidelitySpec(continuous=min(max(level, 0.0), 1.0))


def promote(losses: Sequence[float], n_keep: int) -> np.ndarray:
    """Indices of the n_keep lowest losses, ties broken by insertion order."""
    return np.argsort(np.asarray(losses, dtype=np.float64), kind="stable")[:n_keep]


class _BudgetSpent(Exception):
    pass


def _run_bracket(
    bench: Benchmark,
    plan: HyperbandPlan,
    bracket: Bracket,
    configs: np.ndarray,
    evaluator: Evaluator,
    budget: Optional[int],
) -> None:
    warm = [None] * len(configs)
    for i, (n_i, resource) in enumerate(bracket.rungs):
        fidelity = plan.fidelity(resource)
        losses = []
        for j, z in enumerate(configs):
            if budget is not None and evaluator.n_evals >= budget:
                raise _BudgetSpent
            evaluation = evaluator.evaluate(z, fidelity, warm_starts=warm[j])
            warm[j] = evaluation.value.betas
            losses.append(evaluation.record.loss)
        if i == len(bracket.rungs) - 1:
            break
        keep = promote(losses, n_i // plan.eta)
        if keep.size == 0:
            break
        configs = configs[keep]
        warm = [warm[j] for j in keep]


def hyperband(
    bench: Benchmark,
    plan: Optional[HyperbandPlan] = None,
    seed: int = 0,
    budget: Optional[int] = None,
    seed_default: bool = True,
    evaluator: Optional[Evaluator] = None,
) -> list[EvalRecord]:
    """
    Run Hyperband. Without `budget` one sweep over all brackets is made;
    with it, sweeps repeat until `budget` evaluations are spent. When
    `seed_default` is set, default_init replaces the first sample of the
    first bracket.
    """
    plan = plan or HyperbandPlan()
    if budget is not None and budget < 1:
        raise ConfigError(f"budget must be >= 1, got {budget}")
    evaluator = evaluator or Evaluator(bench, method="hyperband", seed=seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    brackets = plan.brackets()

    sweep = 0
    try:
        while True:
            for b, bracket in enumerate(brackets):
                configs = rng.uniform(-1.0, 1.0, size=(bracket.n_configs, bench.d))
                if seed_default and sweep == 0 and b == 0:
                    configs[0] = default_init(bench)
                _run_bracket(bench, plan, bracket, configs, evaluator, budget)
            sweep += 1
            if budget is None or evaluator.n_evals >= budget:
                break
    except _BudgetSpent:
        pass

    logger.info(
        "hyperband on %s finished: %d sweep(s), %d evaluations, best loss %.6g",
        bench.name, sweep, evaluator.n_evals, evaluator.best.loss,
    )
    return list(evaluator.records)
