"""
Fidelities: inner-solver tolerances that trade accuracy for cost.

Discrete levels 0..4 map to {0.2, 1e-1, 1e-2, 1e-3, 1e-4}; a continuous level
l in [0, 1] maps log-linearly onto [0.2, 1e-4].
"""
import math
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from src.errors import ConfigError

DISCRETE_TOLERANCES = (0.2, 1e-1, 1e-2, 1e-3, 1e-4)
LOWEST_TOL = DISCRETE_TOLERANCES[0]
HIGHEST_TOL = DISCRETE_TOLERANCES[-1]
N_LEVELS = len(DISCRETE_TOLERANCES)


def fidelity_from_resource(level, continuous: bool = False) -> float:
    """Tolerance for a discrete level (0..4) or a continuous level in [0, 1]."""
    if continuous:
        level = float(level)
        if not 0.0 <= level <= 1.0:
            raise ConfigError(f"continuous fidelity must lie in [0, 1], got {level}")
        return math.exp((1.0 - level) * math.log(LOWEST_TOL) + level * math.log(HIGHEST_TOL))
    if isinstance(level, float) and not level.is_integer():
        raise ConfigError(f"discrete fidelity must be an integer level, got {level}")
    level = int(level)
    if not 0 <= level < N_LEVELS:
        raise ConfigError(f"discrete fidelity must be in 0..{N_LEVELS - 1}, got {level}")
    return DISCRETE_TOLERANCES[level]


class FidelitySpec(BaseModel):
    """Wire form: {"discrete": 3} or {"continuous": 0.7}."""

    discrete: Optional[int] = Field(default=None, ge=0, le=N_LEVELS - 1)
    continuous: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.discrete is None) == (self.continuous is None):
            raise ValueError("fidelity needs exactly one of 'discrete' or 'continuous'")
        return self

    @property
    def tolerance(self) -> float:
        if self.discrete is not None:
            return fidelity_from_resource(self.discrete)
        return fidelity_from_resource(self.continuous, continuous=True)

    @classmethod
    def highest(cls) -> "FidelitySpec":
        return cls(discrete=N_LEVELS - 1)

    @classmethod
    def from_tolerance(cls, tol: float) -> "FidelitySpec":
        """Continuous level whose tolerance is `tol` (clamped to [1e-4, 0.2])."""
        tol = min(max(tol, HIGHEST_TOL), LOWEST_TOL)
        level = math.log(tol / LOWEST_TOL) / math.log(HIGHEST_TOL / LOWEST_TOL)
        return cls(continuous=min(max(level, 0.0), 1.0))


class FidelitySchedule(BaseModel):
    mode: Literal["discrete", "continuous"] = "discrete"
    default: FidelitySpec = Field(default_factory=FidelitySpec.highest)

    def resolve(self, spec: Optional[FidelitySpec]) -> FidelitySpec:
        return spec if spec is not None else self.default
