"""
Process-level settings read from the environment.
"""
import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


class Settings(BaseModel):
    data_dir: Path = Field(default=Path("data"))
    log_level: str = "INFO"
    port: int = Field(default=8765, ge=1, le=65535)
    allow_download: bool = False
    benchmark: Optional[str] = None

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            data_dir=Path(os.environ.get("WLASSO_DATA_DIR", "data")),
            log_level=os.environ.get("LOG_LEVEL", "INFO"),
            port=int(os.environ.get("PORT", "8765")),
            allow_download=_env_flag("WLASSO_ALLOW_DOWNLOAD"),
            benchmark=os.environ.get("WLASSO_BENCHMARK") or None,
        )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings for this process, built once from the environment."""
    return Settings.from_env()
