"""
Registry of the real-world LIBSVM benchmarks and their loader.
"""
from __future__ import annotations

import bz2
import json
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import httpx
import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, Field, field_validator

from src.benchgen.benchmark import Benchmark
from src.benchgen.bounds import BoundsKind, compute_bounds
from src.config.logging import get_logger
from src.config.settings import get_settings
from src.criteria.cv import CvConfig
from src.data.libsvm import parse_libsvm
from src.errors import ParseError, ShapeMismatchError, SourceError, UnknownNameError
from src.lasso.dataset import Dataset

logger = get_logger(__name__)

CURRENT_DIR = os.path.dirname(os.path.abspath(__file__))
REGISTRY_FILE = os.path.join(CURRENT_DIR, "registry.json")

# datasets at or below this width are densified for the solver
DENSE_MAX_FEATURES = 512


class DatasetRegistryEntry(BaseModel):
    name: str
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    bounds_kind: BoundsKind = BoundsKind.REAL
    source: list[str]
    url_base: Optional[str] = None
    expected_de: Optional[int] = None
    standardize: bool = True
    drop_empty_columns: bool = False

    @field_validator("source", mode="before")
    @classmethod
    def _listify(cls, value):
        return [value] if isinstance(value, (str, Path)) else value


def load_registry(path: str = REGISTRY_FILE) -> dict[str, DatasetRegistryEntry]:
    with open(path, "r") as file:
        raw = json.load(file)
    entries = [DatasetRegistryEntry(**item) for item in raw]
    return {entry.name: entry for entry in entries}


def get_entry(name: str) -> DatasetRegistryEntry:
    registry = load_registry()
    key = name.lower()
    if key not in registry:
        raise UnknownNameError(f"unknown real-world benchmark {name!r}; choose from {sorted(registry)}")
    return registry[key]


def _download(url: str, target: Path) -> None:
    logger.info("fetching %s", url)
    target.parent.mkdir(parents=True, exist_ok=True)
    partial = target.with_name(target.name + ".part")
    try:
        with httpx.stream("GET", url, follow_redirects=True, timeout=60.0) as response:
            response.raise_for_status()
            with open(partial, "wb") as out:
                for chunk in response.iter_bytes():
                    out.write(chunk)
    except httpx.HTTPError as exc:
        raise SourceError(f"could not fetch {url}: {exc}") from exc
    os.replace(partial, target)


def resolve_source(entry: DatasetRegistryEntry, source: str, data_dir: Path, allow_download: bool) -> Path:
    path = Path(source)
    if not path.is_absolute():
        path = data_dir / path
    if path.exists():
        return path
    if allow_download and entry.url_base:
        _download(entry.url_base + Path(source).name, path)
        return path
    raise SourceError(f"source {path} for {entry.name} is not readable (downloads are disabled)")


@contextmanager
def open_text(path: Path) -> Iterator:
    try:
        handle = bz2.open(path, "rt", encoding="utf-8") if path.suffix == ".bz2" else open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise SourceError(f"cannot open {path}: {exc}") from exc
    with handle:
        try:
            yield handle
        except UnicodeDecodeError as exc:
            raise ParseError(f"{path} is not UTF-8 text: {exc.reason} at byte {exc.start}") from exc
        except EOFError as exc:
            raise SourceError(f"{path} is truncated: {exc}") from exc


def standardize_columns(X):
    """
    Dense: center every column and scale non-constant columns to unit variance.
    Sparse: scale only, since centering would fill the matrix.
    """
    if sp.issparse(X):
        X = sp.csc_matrix(X, dtype=np.float64, copy=True)
        mean = np.asarray(X.mean(axis=0)).ravel()
        mean_sq = np.asarray(X.multiply(X).mean(axis=0)).ravel()
        std = np.sqrt(np.maximum(mean_sq - mean ** 2, 0.0))
        scale = np.where(std > 0, std, 1.0)
        return X @ sp.diags(1.0 / scale)
    X = np.asarray(X, dtype=np.float64)
    X = X - X.mean(axis=0)
    std = X.std(axis=0)
    return X / np.where(std > 0, std, 1.0)


def load_real_benchmark(
    entry: DatasetRegistryEntry,
    data_dir: Optional[Path] = None,
    allow_download: Optional[bool] = None,
    criterion: Optional[CvConfig] = None,
) -> Benchmark:
    settings = get_settings()
    data_dir = Path(data_dir) if data_dir is not None else settings.data_dir
    allow_download = settings.allow_download if allow_download is None else allow_download

    n_features = None if entry.drop_empty_columns else entry.d
    blocks, targets = [], []
    for source in entry.source:
        path = resolve_source(entry, source, data_dir, allow_download)
        with open_text(path) as stream:
            X_part, y_part = parse_libsvm(stream, n_features=n_features)
        blocks.append(X_part)
        targets.append(y_part)

    width = max(block.shape[1] for block in blocks)
    X = sp.vstack(
        [sp.csr_matrix((b.data, b.indices, b.indptr), shape=(b.shape[0], width)) for b in blocks],
        format="csc",
    )
    y = np.concatenate(targets)
    if entry.drop_empty_columns:
        X = X[:, np.flatnonzero(np.diff(X.indptr))]

    if X.shape != (entry.n, entry.d):
        raise ShapeMismatchError(
            f"{entry.name}: parsed shape {X.shape} does not match the registered ({entry.n}, {entry.d})"
        )
    if entry.d <= DENSE_MAX_FEATURES:
        X = X.toarray()
    if entry.standardize:
        X = standardize_columns(X)

    dataset = Dataset(X=X, y=y, name=entry.name)
    lam_min, lam_max = compute_bounds(dataset, entry.bounds_kind)
    logger.info("loaded %s (n=%d, d=%d, sparse=%s)", entry.name, dataset.n, dataset.d, dataset.is_sparse)
    return Benchmark(
        dataset=dataset,
        lam_min=lam_min,
        lam_max=lam_max,
        name=entry.name,
        bounds_kind=entry.bounds_kind,
        criterion=criterion or CvConfig(),
        registry_name=entry.name,
        standardize=entry.standardize,
    )
