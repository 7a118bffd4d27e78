from pydantic import BaseModel, Field, model_validator

from src.errors import UnknownNameError

SNR_NOISELESS = 10.0
SNR_NOISY = 3.0
DEFAULT_SEED = 0

# name -> (n, d, d_e); d_e is 5% of d
PRESETS = {
    "synt_simple": (30, 60, 3),
    "synt_medium": (50, 100, 5),
    "synt_high": (150, 300, 15),
    "synt_hard": (500, 1000, 50),
}


class SyntheticSpec(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    d_e: int = Field(ge=1)
    rho: float = Field(default=0.6, ge=0.0, lt=1.0)
    snr: float = Field(default=SNR_NOISELESS, gt=0.0)
    seed: int = DEFAULT_SEED

    @model_validator(mode="after")
    def _support_fits(self):
        if self.d_e > self.d:
            raise ValueError(f"d_e={self.d_e} cannot exceed d={self.d}")
        return self

    @classmethod
    def preset(cls, name: str, noise: bool = False, seed: int = DEFAULT_SEED) -> "SyntheticSpec":
        if name not in PRESETS:
            raise UnknownNameError(f"unknown synthetic preset {name!r}; choose from {sorted(PRESETS)}")
        n, d, d_e = PRESETS[name]
        return cls(n=n, d=d, d_e=d_e, snr=SNR_NOISY if noise else SNR_NOISELESS, seed=seed)
