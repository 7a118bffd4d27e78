"""
Benchmark lookup by name or manifest, and benchmark persistence.
"""
from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np

from src.benchgen.benchmark import Benchmark, BenchmarkManifest
from src.benchgen.synthetic import PRESET_NAMES, make_preset, make_synthetic
from src.config.logging import get_logger
from src.data.registry import get_entry, load_real_benchmark, load_registry
from src.errors import ConfigError, UnknownNameError

logger = get_logger(__name__)

NOISY_SUFFIX = "_noisy"


def available_benchmarks() -> list[str]:
    synthetic = [name for preset in PRESET_NAMES for name in (preset, preset + NOISY_SUFFIX)]
    return synthetic + sorted(load_registry())


def from_manifest(manifest: BenchmarkManifest, data_dir: Optional[Path] = None) -> Benchmark:
    """Rebuild a benchmark; synthetic ones regenerate bit-identically from their spec."""
    if manifest.kind == "synthetic":
        if manifest.spec is None:
            raise ConfigError(f"synthetic manifest {manifest.name} has no generator parameters")
        bench = make_synthetic(manifest.spec, name=manifest.name, criterion=manifest.criterion, fidelity=manifest.fidelity)
    else:
        if manifest.registry_name is None:
            raise ConfigError(f"real-world manifest {manifest.name} has no registry name")
        bench = load_real_benchmark(get_entry(manifest.registry_name), data_dir=data_dir, criterion=manifest.criterion)
        bench = replace(bench, fidelity=manifest.fidelity, name=manifest.name)
    if not (math.isclose(bench.lam_min, manifest.lam_min, rel_tol=1e-12, abs_tol=1e-12)
            and math.isclose(bench.lam_max, manifest.lam_max, rel_tol=1e-12, abs_tol=1e-12)):
        raise ConfigError(
            f"{manifest.name}: rebuilt bounds [{bench.lam_min}, {bench.lam_max}] differ from the manifest "
            f"[{manifest.lam_min}, {manifest.lam_max}]"
        )
    return bench


def resolve_benchmark(name_or_path: str, seed: Optional[int] = None, data_dir: Optional[Path] = None) -> Benchmark:
    """
    A preset name (synt_simple ... synt_hard, optionally with the _noisy
    suffix), a registry name (case-insensitive), or a path to a manifest file.
    """
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        return from_manifest(load_manifest(path), data_dir=data_dir)

    base, noise = name_or_path, False
    if base.endswith(NOISY_SUFFIX):
        base, noise = base[: -len(NOISY_SUFFIX)], True
    if base in PRESET_NAMES:
        return make_preset(base, noise=noise, seed=seed)
    if name_or_path.lower() in load_registry():
        return load_real_benchmark(get_entry(name_or_path), data_dir=data_dir)
    raise UnknownNameError(f"unknown benchmark {name_or_path!r}; choose from {available_benchmarks()} or a manifest path")


def load_manifest(path: Path) -> BenchmarkManifest:
    try:
        return BenchmarkManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ConfigError(f"invalid benchmark manifest {path}: {exc}") from exc


def save_benchmark(bench: Benchmark, out_dir: Path) -> tuple[Path, Path]:
    """Write <name>.json (manifest) and <name>.npz (X, y, beta_true) into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / f"{bench.name}.json"
    data_path = out_dir / f"{bench.name}.npz"
    manifest_path.write_text(bench.manifest().model_dump_json(indent=2) + "\n", encoding="utf-8")

    X = bench.dataset.X
    arrays = {"X": X.toarray() if bench.dataset.is_sparse else np.asarray(X), "y": bench.dataset.y}
    if bench.beta_true is not None:
        arrays["beta_true"] = bench.beta_true
    with open(data_path, "wb") as handle:
        np.savez(handle, **arrays)
    logger.info("wrote %s and %s", manifest_path, data_path)
    return manifest_path, data_path
