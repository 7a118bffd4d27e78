"""
Trajectory records and their JSON-lines persistence.
"""
from __future__ import annotations

import math
import os
from pathlib import Path
from typing import Iterable, Optional

from pydantic import BaseModel, field_validator

from src.benchgen.fidelity import FidelitySpec


class EvalRecord(BaseModel):
    """One evaluated configuration. `loss` is scaled where the benchmark has a reference."""

    ordinal: int
    benchmark: str
    method: str = ""
    z: list[float]
    fidelity: Optional[FidelitySpec] = None
    tol: float
    loss: float
    raw_loss: float
    cost_units: int
    wall_ns: int = 0
    seed: int = 0
    clipped: bool = False

    @field_validator("loss", "raw_loss")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("loss must be finite")
        return value


def write_jsonl(records: Iterable[EvalRecord], path: Path) -> None:
    """Write records atomically: a temporary sibling file is renamed into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as out:
        for record in records:
            out.write(record.model_dump_json() + "\n")
    os.replace(tmp, path)


def read_jsonl(path: Path) -> list[EvalRecord]:
    with open(path, "r", encoding="utf-8") as handle:
        return [EvalRecord.model_validate_json(line) for line in handle if line.strip()]
