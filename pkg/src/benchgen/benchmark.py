"""
A reproducible HPO problem instance: dataset, lambda bounds, criterion and
fidelity schedule, plus ground truth for synthetic instances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from src.benchgen.bounds import BoundsKind
from src.benchgen.fidelity import FidelitySchedule
from src.benchgen.synthetic_spec import SyntheticSpec
from src.criteria.cv import CvConfig, CvSplit, make_split, reference_loss
from src.errors import ConfigError, DimensionError
from src.lasso.dataset import Dataset


class BenchmarkManifest(BaseModel):
    """Everything needed to rebuild a benchmark bit-identically."""

    name: str
    kind: Literal["synthetic", "real"]
    bounds_kind: BoundsKind
    spec: Optional[SyntheticSpec] = None
    registry_name: Optional[str] = None
    standardize: bool = False
    lam_min: float
    lam_max: float
    criterion: CvConfig = Field(default_factory=CvConfig)
    fidelity: FidelitySchedule = Field(default_factory=FidelitySchedule)


@dataclass(frozen=True, eq=False)
class Benchmark:
    dataset: Dataset
    lam_min: float
    lam_max: float
    name: str
    bounds_kind: BoundsKind
    criterion: CvConfig = field(default_factory=CvConfig)
    fidelity: FidelitySchedule = field(default_factory=FidelitySchedule)
    beta_true: Optional[np.ndarray] = None
    spec: Optional[SyntheticSpec] = None
    registry_name: Optional[str] = None
    standardize: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.lam_min) and math.isfinite(self.lam_max)):
            raise ConfigError("lambda bounds must be finite")
        if not self.lam_min < self.lam_max:
            raise ConfigError(f"lam_min={self.lam_min} must be below lam_max={self.lam_max}")
        if self.criterion.k_folds > self.dataset.n:
            raise ConfigError(f"k_folds={self.criterion.k_folds} exceeds n={self.dataset.n}")
        if self.beta_true is not None:
            beta = np.asarray(self.beta_true, dtype=np.float64)
            if beta.shape != (self.dataset.d,):
                raise DimensionError("beta_true must have one entry per feature", expected=self.dataset.d)
            if self.spec is not None and np.count_nonzero(beta) != self.spec.d_e:
                raise ConfigError(f"beta_true must have exactly d_e={self.spec.d_e} nonzeros")
            beta.flags.writeable = False
            object.__setattr__(self, "beta_true", beta)

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def d(self) -> int:
        return self.dataset.d

    @property
    def is_synthetic(self) -> bool:
        return self.spec is not None

    @cached_property
    def cv_split(self) -> CvSplit:
        return make_split(self.dataset, self.criterion)

    @cached_property
    def reference(self) -> Optional[float]:
        """Reference CV loss of beta_true (synthetic benchmarks only)."""
        return reference_loss(self) if self.beta_true is not None else None

    def manifest(self) -> BenchmarkManifest:
        return BenchmarkManifest(
            name=self.name,
            kind="synthetic" if self.is_synthetic else "real",
            bounds_kind=self.bounds_kind,
            spec=self.spec,
            registry_name=self.registry_name,
            standardize=self.standardize,
            lam_min=self.lam_min,
            lam_max=self.lam_max,
            criterion=self.criterion,
            fidelity=self.fidelity,
        )
