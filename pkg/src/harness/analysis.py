"""
Post-processing: fidelity correlation, reference cost, and best-so-far
curves exported for plotting.
"""
from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional, Sequence

import numpy as np
import pandas as pd

from src.benchgen.benchmark import Benchmark
from src.benchgen.fidelity import N_LEVELS, FidelitySpec
from src.config.logging import get_logger
from src.errors import ConfigError
from src.harness.evaluator import evaluate_point
from src.harness.records import read_jsonl

logger = get_logger(__name__)

Axis = Literal["ordinal", "cost", "wall"]

_AXIS_COLUMN = {"ordinal": "ordinal", "cost": "cost_units", "wall": "wall_ns"}


def _probes(bench: Benchmark, n_probes: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.uniform(-1.0, 1.0, size=(n_probes, bench.d))


def fidelity_losses(bench: Benchmark, n_probes: int = 100, seed: int = 0) -> pd.DataFrame:
    """Loss of each uniform probe (rows) at every discrete fidelity level (columns)."""
    if n_probes < 3:
        raise ConfigError(f"n_probes must be >= 3, got {n_probes}")
    rows = []
    for z in _probes(bench, n_probes, seed):
        rows.append([evaluate_point(bench, z, FidelitySpec(discrete=level))[0].objective for level in range(N_LEVELS)])
    return pd.DataFrame(rows, columns=list(range(N_LEVELS)))


def fidelity_correlation(bench: Benchmark, n_probes: int = 100, seed: int = 0) -> np.ndarray:
    """
    Pearson correlation of losses between fidelity levels (5x5). An entry is
    NaN where either level's losses are constant over the probes; the
    diagonal is 1.
    """
    losses = fidelity_losses(bench, n_probes, seed)
    corr = losses.corr(method="pearson").to_numpy()
    corr = (corr + corr.T) / 2
    np.fill_diagonal(corr, 1.0)
    degenerate = losses.std(ddof=0).to_numpy() == 0.0
    if degenerate.any():
        logger.warning("constant losses at fidelity level(s) %s on %s", np.flatnonzero(degenerate).tolist(), bench.name)
    return corr


def measure_reference_cost(bench: Benchmark, n_probes: int = 1000, seed: int = 0) -> float:
    """Mean cost of a highest-fidelity evaluation over uniform probes."""
    if n_probes < 1:
        raise ConfigError(f"n_probes must be >= 1, got {n_probes}")
    highest = FidelitySpec.highest()
    costs = [evaluate_point(bench, z, highest)[0].cost for z in _probes(bench, n_probes, seed)]
    return float(np.mean(costs))


def load_runs(paths: Sequence[Path]) -> list[pd.DataFrame]:
    """One frame per run file; rejects files from different benchmarks."""
    runs = []
    benchmarks = set()
    for path in paths:
        records = read_jsonl(path)
        if not records:
            raise ConfigError(f"run file {path} holds no records")
        frame = pd.DataFrame(
            [{"ordinal": r.ordinal, "loss": r.loss, "cost_units": r.cost_units, "wall_ns": r.wall_ns} for r in records]
        )
        benchmarks.update(r.benchmark for r in records)
        runs.append(frame)
    if not runs:
        raise ConfigError("no run files given")
    if len(benchmarks) > 1:
        raise ConfigError(f"run files mix benchmarks: {sorted(benchmarks)}")
    return runs


def _best_so_far(run: pd.DataFrame, axis: Axis) -> pd.Series:
    best = run["loss"].cummin()
    if axis == "ordinal":
        index = run["ordinal"]
    else:
        index = run[_AXIS_COLUMN[axis]].cumsum()
    series = pd.Series(best.to_numpy(), index=index.to_numpy())
    # several records at the same cumulative cost keep the last (lowest) value
    return series[~series.index.duplicated(keep="last")]


def export_plotdata(
    paths: Sequence[Path],
    axis: Axis = "ordinal",
    reference_cost: Optional[float] = None,
) -> pd.DataFrame:
    """
    Best-so-far curves aggregated over repetitions. Each run's curve is a step
    function of the axis, carried forward to the union of all runs' axis
    values; mean and std (population) are taken over the runs defined there.
    On the cost axis, `reference_cost` adds an effective_evals column.
    """
    if axis not in _AXIS_COLUMN:
        raise ConfigError(f"axis must be one of {sorted(_AXIS_COLUMN)}, got {axis!r}")
    curves = [_best_so_far(run, axis) for run in load_runs(paths)]
    grid = sorted(set().union(*(curve.index for curve in curves)))
    table = pd.concat([curve.reindex(grid, method="ffill") for curve in curves], axis=1)

    column = _AXIS_COLUMN[axis]
    out = pd.DataFrame({
        column: grid,
        "best_so_far_mean": table.mean(axis=1, skipna=True).to_numpy(),
        "best_so_far_std": table.std(axis=1, ddof=0, skipna=True).to_numpy(),
        "n_runs": table.notna().sum(axis=1).to_numpy(),
    })
    if axis == "cost" and reference_cost:
        out["effective_evals"] = out[column] / reference_cost
    return out
