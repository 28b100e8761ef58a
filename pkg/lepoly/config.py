"""
Run configuration.

Defaults come from the environment (a `.env` file is honoured); command-line
flags and tool arguments override them per run.
"""

import os
from typing import Any, Dict, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

load_dotenv()


def _env_float(name: str, default: str) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: str) -> int:
    return int(os.getenv(name, default))


class RunConfig(BaseModel):
    """Everything one pipeline run depends on.

    Two runs with equal configs produce byte-identical reports.
    """

    f: str
    g: str = "1"
    t: Union[str, float] = "auto"
    arg_t: float = 0.0
    seed: int = Field(default_factory=lambda: _env_int("LEPOLY_SEED", "0"), ge=0)
    trunc: int = Field(default_factory=lambda: _env_int("LEPOLY_TRUNC", "20"), ge=1)
    epsilon: float = Field(
        default_factory=lambda: _env_float("LEPOLY_EPSILON", "0.5"), gt=0, lt=1
    )
    tol_root: float = Field(
        default_factory=lambda: _env_float("LEPOLY_TOL_ROOT", "1e-10"), gt=0
    )
    cluster_tol: float = Field(
        default_factory=lambda: _env_float("LEPOLY_CLUSTER_TOL", "1e-6"), gt=0
    )
    guard_factor: float = Field(
        default_factory=lambda: _env_float("LEPOLY_GUARD_FACTOR", "1e-2"), gt=0, lt=0.5
    )
    escape_margin: float = Field(
        default_factory=lambda: _env_float("LEPOLY_ESCAPE_MARGIN", "1e-3"), gt=0, lt=0.5
    )
    max_step: float = Field(
        default_factory=lambda: _env_float("LEPOLY_MAX_STEP", "0.02"), gt=0, le=1
    )
    min_step: float = Field(
        default_factory=lambda: _env_float("LEPOLY_MIN_STEP", "1e-12"), gt=0
    )
    max_retries: int = Field(
        default_factory=lambda: _env_int("LEPOLY_MAX_RETRIES", "6"), ge=0
    )
    grid_refinement: int = Field(
        default_factory=lambda: _env_int("LEPOLY_GRID_REFINEMENT", "1"), ge=1
    )
    workers: int = Field(default_factory=lambda: _env_int("LEPOLY_WORKERS", "4"), ge=1)
    report_path: Optional[str] = None
    dot_path: Optional[str] = None
    csv_path: Optional[str] = None
    oracle: bool = False

    @field_validator("t")
    @classmethod
    def _check_t(cls, value: Union[str, float]) -> Union[str, float]:
        if isinstance(value, str):
            if value.strip().lower() == "auto":
                return "auto"
            value = float(value)
        if not value > 0:
            raise ValueError("t magnitude must be positive or 'auto'")
        return float(value)

    @property
    def t_magnitude(self) -> Optional[float]:
        """Explicit |t| override, None when the geometry picks it."""
        return None if self.t == "auto" else float(self.t)

    def echo(self) -> Dict[str, Any]:
        """Config fields that influence the computation (output paths excluded)."""
        return self.model_dump(exclude={"report_path", "dot_path", "csv_path", "workers"})
