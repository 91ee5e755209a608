"""
Run configuration: numeric tolerances, scan sizes and output locations
"""
import hashlib
import json
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator, model_validator

load_dotenv()

DEFAULT_CONFIG_PATH = Path("data/default_config.json")


class Tolerances(BaseModel):
    """Named tolerances shared by every module. All values are positive."""
    incidence: float = 1e-9
    eigen: float = 1e-8
    gap: float = 1e-6
    general_position: float = 1e-8
    det: float = 1e-10
    dedup: float = 1e-8
    relator: float = 1e-9
    rank: float = 1e-6

    @field_validator("*")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tolerances must be positive")
        return value


DEFAULT_TOLERANCES = Tolerances()


class BenzecriConfig(BaseModel):
    """Parameters of the half-ellipse iteration experiment"""
    lam: float = 1.0
    steps: int = Field(default=20, ge=0)
    grid_per_unit: int = Field(default=4, ge=1)
    grid_span: float = Field(default=60.0, gt=0)
    cut_index: int = 0

    @model_validator(mode="after")
    def _grid_is_invariant(self) -> "BenzecriConfig":
        shift = self.lam * self.grid_per_unit
        if abs(shift - round(shift)) > 1e-9:
            raise ValueError("lam * grid_per_unit must be an integer")
        return self

    @property
    def grid_shift(self) -> int:
        """Grid index shift produced by one application of the iteration matrix"""
        return int(round(self.lam * self.grid_per_unit))


class RunConfig(BaseModel):
    rep_path: str = "results/fuchsian_rep.json"
    max_word_len: int = Field(default=3, ge=0)
    leaf_samples: int = 128
    base_angles: List[float] = [0.4, 2.0, 3.6, 5.2]
    leaf_count: int = Field(default=8, ge=1)
    tolerances: Tolerances = Tolerances()
    output_dir: str = "results"
    trace_path: str = "results/evaluation_trace.json"
    seed: int = 7
    workers: int = Field(default=1, ge=1)
    model_word: str = "a1"
    model_window: int = Field(default=10, ge=2)
    densify_steps: int = Field(default=8, ge=0)
    general_position_trials: int = Field(default=200, ge=0)
    benzecri: BenzecriConfig = BenzecriConfig()

    @field_validator("leaf_samples")
    @classmethod
    def _enough_samples(cls, value: int) -> int:
        if value < 16:
            raise ValueError("leaf_samples must be at least 16")
        return value

    @field_validator("base_angles")
    @classmethod
    def _distinct_base_angles(cls, value: List[float]) -> List[float]:
        if len(value) != 4:
            raise ValueError("exactly 4 base angles are required")
        wrapped = sorted(a % (2 * math.pi) for a in value)
        gaps = [b - a for a, b in zip(wrapped, wrapped[1:])]
        gaps.append(wrapped[0] + 2 * math.pi - wrapped[-1])
        if min(gaps) < 1e-6:
            raise ValueError("base angles must be pairwise distinct")
        return value

    def config_hash(self) -> str:
        """Short digest of the canonical JSON form, written into every CSV"""
        payload = json.dumps(self.model_dump(), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


_ENV_OVERRIDES = {
    "LEAFMAP_REP": ("rep_path", str),
    "LEAFMAP_MAX_LEN": ("max_word_len", int),
    "LEAFMAP_SAMPLES": ("leaf_samples", int),
    "LEAFMAP_OUTPUT_DIR": ("output_dir", str),
    "LEAFMAP_TRACE": ("trace_path", str),
    "LEAFMAP_SEED": ("seed", int),
    "LEAFMAP_WORKERS": ("workers", int),
}


def load_config(config_path: Path = DEFAULT_CONFIG_PATH,
                overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Load the run configuration, creating the default file on first use.

    Precedence: file < LEAFMAP_* environment variables < explicit overrides
    (the CLI flags). Overrides with value None are ignored.
    """
    config_path = Path(config_path)
    if not config_path.exists():
        default_config = RunConfig().model_dump()
        config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(config_path, 'w') as f:
            json.dump(default_config, f, indent=2)
        data = default_config
    else:
        with open(config_path, 'r') as f:
            data = json.load(f)

    for env_name, (field_name, cast) in _ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw:
            data[field_name] = cast(raw)

    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value

    return RunConfig(**data)
