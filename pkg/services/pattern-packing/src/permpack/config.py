# services/pattern-packing/src/permpack/config.py
import os
from functools import lru_cache
from typing import Any, Dict, List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

load_dotenv()


class Settings(BaseModel):
    """Process-wide settings read from the environment (.env is honoured)"""

    model_config = ConfigDict(frozen=True)

    threads: int = Field(default=1, ge=1)
    log_level: str = "INFO"
    log_format: Literal["console", "json"] = "console"
    max_pattern_length: int = Field(default=12, ge=1)
    max_order: int = Field(default=8, ge=1)
    brute_force_cap: int = Field(default=9, ge=1)
    brute_force_hard_cap: int = Field(default=10, ge=1)
    layered_cap: int = Field(default=20, ge=1)
    qblock_cap: int = Field(default=2**20, ge=1)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        threads=int(os.getenv("PERMPACK_THREADS", "1")),
        log_level=os.getenv("LOG_LEVEL", "INFO"),
        log_format=os.getenv("LOG_FORMAT", "console"),
        max_pattern_length=int(os.getenv("PERMPACK_MAX_PATTERN_LENGTH", "12")),
        max_order=int(os.getenv("PERMPACK_MAX_ORDER", "8")),
        brute_force_cap=int(os.getenv("PERMPACK_BRUTE_FORCE_CAP", "9")),
        brute_force_hard_cap=int(os.getenv("PERMPACK_BRUTE_FORCE_HARD_CAP", "10")),
        layered_cap=int(os.getenv("PERMPACK_LAYERED_CAP", "20")),
        qblock_cap=int(os.getenv("PERMPACK_QBLOCK_CAP", str(2**20))),
    )


class OptimizerConfig(BaseModel):
    """Multi-start optimizer knobs; results are deterministic for a fixed seed"""

    model_config = ConfigDict(frozen=True)

    starts: int = Field(default=64, gt=0)
    max_iters: int = Field(default=10000, gt=0)
    step_tol: float = Field(default=1e-12, gt=0)
    value_tol: float = Field(default=1e-9, gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default_factory=lambda: get_settings().threads, gt=0)
    # check the ascent property after every multiplicative step
    debug: bool = False


class RunConfig(BaseModel):
    """Fully resolved invocation, echoed into every report"""

    subcommand: str
    arguments: Dict[str, Any] = Field(default_factory=dict)
    optimizer: Optional[OptimizerConfig] = None
    output_format: Literal["json", "csv", "text"] = "json"
    seed: int = 0
    forced: bool = False
    warnings: List[str] = Field(default_factory=list)
