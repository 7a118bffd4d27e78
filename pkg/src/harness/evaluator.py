"""
Objective evaluation with trajectory bookkeeping.

`evaluate_point` is the pure map (benchmark, z, fidelity) -> criterion value;
`Evaluator` adds ordinals, cost metering and wall time on top of it.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.benchgen.benchmark import Benchmark
from src.benchgen.bounds import from_search_space, to_search_space
from src.benchgen.fidelity import FidelitySpec
from src.config.logging import get_logger
from src.criteria.cv import CriterionValue, cv_loss
from src.errors import DimensionError
from src.harness.records import EvalRecord

logger = get_logger(__name__)


def evaluate_lam(
    bench: Benchmark,
    lam: np.ndarray,
    tol: float,
    warm_starts: Optional[Sequence[Optional[np.ndarray]]] = None,
) -> CriterionValue:
    return cv_loss(
        bench.dataset, lam, bench.criterion,
        split=bench.cv_split, reference=bench.reference, warm_starts=warm_starts, tol=tol,
    )


def evaluate_point(
    bench: Benchmark,
    z,
    fidelity: Optional[FidelitySpec] = None,
    warm_starts: Optional[Sequence[Optional[np.ndarray]]] = None,
) -> tuple[CriterionValue, bool]:
    """Evaluate a search-space point; returns (value, clipped)."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.shape[0] != bench.d:
        raise DimensionError(f"point must have {bench.d} coordinates, got shape {z.shape}", expected=bench.d)
    lam, clipped = from_search_space(bench, z)
    tol = bench.fidelity.resolve(fidelity).tolerance
    return evaluate_lam(bench, lam, tol, warm_starts), clipped


@dataclass(frozen=True)
class Evaluation:
    record: EvalRecord
    value: CriterionValue
    lam: np.ndarray


class Evaluator:
    """Evaluates configurations of one benchmark and keeps the run's trajectory."""

    def __init__(
        self,
        bench: Benchmark,
        method: str = "",
        seed: int = 0,
        record_wall_time: bool = False,
        store_points: bool = True,
    ):
        self.bench = bench
        self.method = method
        self.seed = seed
        self.record_wall_time = record_wall_time
        self.store_points = store_points
        self.records: list[EvalRecord] = []
        self.lams: list[np.ndarray] = []

    @property
    def n_evals(self) -> int:
        return len(self.records)

    @property
    def best_index(self) -> Optional[int]:
        """Ordinal of the first record with the lowest loss."""
        if not self.records:
            return None
        return min(range(len(self.records)), key=lambda i: self.records[i].loss)

    @property
    def best(self) -> Optional[EvalRecord]:
        index = self.best_index
        return None if index is None else self.records[index]

    def record(
        self,
        lam: np.ndarray,
        value: CriterionValue,
        tol: float,
        fidelity: Optional[FidelitySpec] = None,
        wall_ns: int = 0,
        extra_cost: int = 0,
        clipped: bool = False,
        z: Optional[np.ndarray] = None,
    ) -> EvalRecord:
        """Append a record for an evaluation done elsewhere; `z` defaults to the image of `lam`."""
        if z is None:
            z, lam_clipped = to_search_space(self.bench, lam)
            clipped = clipped or lam_clipped
        else:
            z = np.clip(np.asarray(z, dtype=np.float64), -1.0, 1.0)
        record = EvalRecord(
            ordinal=len(self.records),
            benchmark=self.bench.name,
            method=self.method,
            z=z.tolist() if self.store_points else [],
            fidelity=fidelity,
            tol=tol,
            loss=value.objective,
            raw_loss=value.loss,
            cost_units=value.cost + extra_cost,
            wall_ns=wall_ns if self.record_wall_time else 0,
            seed=self.seed,
            clipped=clipped,
        )
        self.records.append(record)
        self.lams.append(np.array(lam, dtype=np.float64))
        logger.debug("eval #%d %s loss=%.6g cost=%d", record.ordinal, self.bench.name, record.loss, record.cost_units)
        return record

    def evaluate(
        self,
        z,
        fidelity: Optional[FidelitySpec] = None,
        warm_starts: Optional[Sequence[Optional[np.ndarray]]] = None,
    ) -> Evaluation:
        fidelity = self.bench.fidelity.resolve(fidelity)
        start = time.perf_counter_ns()
        value, clipped = evaluate_point(self.bench, z, fidelity, warm_starts)
        wall = time.perf_counter_ns() - start
        lam, _ = from_search_space(self.bench, z)
        record = self.record(lam, value, fidelity.tolerance, fidelity, wall, clipped=clipped, z=z)
        return Evaluation(record=record, value=value, lam=lam)

    def evaluate_lam(
        self,
        lam,
        tol: float,
        warm_starts: Optional[Sequence[Optional[np.ndarray]]] = None,
        fidelity: Optional[FidelitySpec] = None,
    ) -> Evaluation:
        lam = np.asarray(lam, dtype=np.float64)
        start = time.perf_counter_ns()
        value = evaluate_lam(self.bench, lam, tol, warm_starts)
        wall = time.perf_counter_ns() - start
        record = self.record(lam, value, tol, fidelity, wall)
        return Evaluation(record=record, value=value, lam=lam)
