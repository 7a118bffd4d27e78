"""
Repeated-run experiments: one method, one benchmark, `repetitions` seeds.

Output directory layout:

    experiment.json     the manifest that was run
    rep_000.jsonl ...   one trajectory per repetition (seed = base_seed + r)
    rep_007.failed      failure marker next to a partial trajectory
    summary.json        mean / std of the best loss over completed repetitions
"""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Callable, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from src.baselines.adaptive import DEFAULT_EPS, DEFAULT_REWEIGHTS, adaptive_lasso_cv
from src.baselines.grid import DEFAULT_GRID_POINTS, GridSpec, lasso_cv
from src.baselines.sparse_ho import SparseHoConfig, multi_start_sparse_ho, sparse_ho
from src.benchgen.benchmark import Benchmark, BenchmarkManifest
from src.benchgen.fidelity import FidelitySpec
from src.config.logging import get_logger
from src.errors import BenchError, ConfigError
from src.harness.benchmarks import from_manifest, resolve_benchmark
from src.harness.evaluator import Evaluator
from src.harness.records import read_jsonl, write_jsonl
from src.optimizers.cmaes import CmaConfig, cmaes
from src.optimizers.hyperband import HyperbandPlan, hyperband
from src.optimizers.random_search import random_search

logger = get_logger(__name__)

MethodName = Literal[
    "random_search",
    "cmaes",
    "hyperband",
    "lasso_cv",
    "adaptive_lasso_cv",
    "sparse_ho",
    "multi_start_sparse_ho",
]


class ExperimentManifest(BaseModel):
    benchmark: Union[BenchmarkManifest, str]
    method: MethodName
    config: dict[str, Any] = Field(default_factory=dict)
    budget: int = Field(default=1000, ge=1)
    repetitions: int = Field(default=30, ge=1)
    base_seed: int = 0
    fidelity: Optional[FidelitySpec] = None
    record_wall_time: bool = False
    store_points: bool = True

    def seed(self, repetition: int) -> int:
        return self.base_seed + repetition


class ExperimentSummary(BaseModel):
    benchmark: str
    method: str
    repetitions: int
    completed: list[int]
    failed: list[int] = Field(default_factory=list)
    best_losses: list[float]
    mean: Optional[float] = None
    std: Optional[float] = None


Runner = Callable[[Benchmark, Evaluator, ExperimentManifest, int], None]


def _run_random_search(bench, evaluator, manifest, seed):
    random_search(bench, manifest.budget, manifest.fidelity, seed, evaluator=evaluator)


def _run_cmaes(bench, evaluator, manifest, seed):
    cmaes(bench, manifest.budget, CmaConfig(**manifest.config), seed, manifest.fidelity, evaluator=evaluator)


def _run_hyperband(bench, evaluator, manifest, seed):
    hyperband(
        bench,
        HyperbandPlan(**manifest.config),
        seed,
        budget=manifest.budget,
        seed_default=manifest.config.get("seed_default", True),
        evaluator=evaluator,
    )


def _grid(bench, manifest) -> GridSpec:
    return GridSpec.for_benchmark(bench, manifest.config.get("n_points", DEFAULT_GRID_POINTS))


def _run_lasso_cv(bench, evaluator, manifest, seed):
    lasso_cv(bench, _grid(bench, manifest), evaluator=evaluator)


def _run_adaptive(bench, evaluator, manifest, seed):
    adaptive_lasso_cv(
        bench,
        _grid(bench, manifest),
        n_reweight=manifest.config.get("n_reweight", DEFAULT_REWEIGHTS),
        eps=manifest.config.get("eps", DEFAULT_EPS),
        evaluator=evaluator,
    )


def _run_sparse_ho(bench, evaluator, manifest, seed):
    cfg = SparseHoConfig(**{"max_outer_iters": manifest.budget, **manifest.config})
    sparse_ho(bench, cfg, evaluator=evaluator)


def _run_multi_start(bench, evaluator, manifest, seed):
    multi_start_sparse_ho(bench, SparseHoConfig(**manifest.config), manifest.budget, seed, evaluator=evaluator)


METHODS: dict[str, Runner] = {
    "random_search": _run_random_search,
    "cmaes": _run_cmaes,
    "hyperband": _run_hyperband,
    "lasso_cv": _run_lasso_cv,
    "adaptive_lasso_cv": _run_adaptive,
    "sparse_ho": _run_sparse_ho,
    "multi_start_sparse_ho": _run_multi_start,
}


def load_experiment(path: Path) -> ExperimentManifest:
    try:
        return ExperimentManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ConfigError(f"invalid experiment manifest {path}: {exc}") from exc


def _benchmark(manifest: ExperimentManifest, data_dir: Optional[Path]) -> Benchmark:
    if isinstance(manifest.benchmark, BenchmarkManifest):
        return from_manifest(manifest.benchmark, data_dir=data_dir)
    return resolve_benchmark(manifest.benchmark, data_dir=data_dir)


def rep_path(out_dir: Path, repetition: int) -> Path:
    return Path(out_dir) / f"rep_{repetition:03d}.jsonl"


def _write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def summarize(paths: list[Path], benchmark: str = "", method: str = "", failed: Optional[list[int]] = None) -> ExperimentSummary:
    """Summary statistics recomputed from trajectory files."""
    best = []
    completed = []
    for path in paths:
        records = read_jsonl(path)
        if not records:
            continue
        best.append(min(rec.loss for rec in records))
        completed.append(int(Path(path).stem.split("_")[-1]))
        benchmark = benchmark or records[0].benchmark
        method = method or records[0].method
    values = np.asarray(best, dtype=np.float64)
    return ExperimentSummary(
        benchmark=benchmark,
        method=method,
        repetitions=len(completed) + len(failed or []),
        completed=completed,
        failed=list(failed or []),
        best_losses=best,
        mean=float(values.mean()) if values.size else None,
        std=float(values.std()) if values.size else None,
    )


def run_experiment(manifest: ExperimentManifest, out_dir: Path, data_dir: Optional[Path] = None) -> ExperimentSummary:
    """
    Run every repetition and write the result files. A failing repetition
    keeps its partial trajectory, gets a failure marker, and the remaining
    repetitions still run.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bench = _benchmark(manifest, data_dir)
    runner = METHODS[manifest.method]
    _write_text(out_dir / "experiment.json", manifest.model_dump_json(indent=2) + "\n")
    logger.info(
        "running %s on %s: %d repetition(s), budget %d",
        manifest.method, bench.name, manifest.repetitions, manifest.budget,
    )

    completed_paths, failed = [], []
    for r in range(manifest.repetitions):
        seed = manifest.seed(r)
        evaluator = Evaluator(
            bench,
            method=manifest.method,
            seed=seed,
            record_wall_time=manifest.record_wall_time,
            store_points=manifest.store_points,
        )
        path = rep_path(out_dir, r)
        try:
            runner(bench, evaluator, manifest, seed)
        except BenchError as exc:
            logger.error("repetition %d (seed %d) failed: %s", r, seed, exc)
            write_jsonl(evaluator.records, path)
            marker = {"repetition": r, "seed": seed, "error": exc.code, "message": str(exc)}
            _write_text(path.with_suffix(".failed"), json.dumps(marker) + "\n")
            failed.append(r)
            continue
        write_jsonl(evaluator.records, path)
        completed_paths.append(path)
        logger.info("repetition %d (seed %d): best loss %.6g", r, seed, evaluator.best.loss)

    summary = summarize(completed_paths, bench.name, manifest.method, failed)
    _write_text(out_dir / "summary.json", summary.model_dump_json(indent=2) + "\n")
    logger.info("experiment finished: mean best %s, std %s", summary.mean, summary.std)
    return summary
