"""Engine configuration: one JSON file plus environment overrides.

Search order for each setting: explicit constructor argument, then the
``PROFILER_*`` environment variable, then the config file, then the
default.  The config file path itself comes from ``--config`` /
``PROFILER_CONFIG`` and is optional.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from ..errors import ValidationError

_ENV_PREFIX = "PROFILER_"


@dataclass
class EngineConfig:
    data_dir: Path = field(default_factory=lambda: Path("profiler-data"))
    workers: int = 4
    time_budget_s: Optional[float] = 600.0
    memory_budget_mb: Optional[int] = 2048
    checkpoint_interval_s: float = 1.0
    """Upper bound on how long a running executor may go between
    cancellation checkpoints; actual checks are far more frequent."""
    snippet_rows: int = 10
    ind_spill_threshold: int = 1_000_000
    static_dir: Optional[Path] = None
    host: str = "127.0.0.1"
    port: int = 8400

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        if self.static_dir is not None:
            self.static_dir = Path(self.static_dir)
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")

    @property
    def memory_budget_bytes(self) -> Optional[int]:
        if self.memory_budget_mb is None:
            return None
        return self.memory_budget_mb * 1024 * 1024


def load_config(path: Optional[str] = None, **overrides) -> EngineConfig:
    """Load configuration from a JSON file with environment overrides."""
    values: dict = {}
    config_path = path or os.environ.get(_ENV_PREFIX + "CONFIG")
    if config_path:
        p = Path(config_path)
        if not p.exists():
            raise ValidationError(f"config file not found: {config_path}")
        try:
            values.update(json.loads(p.read_text(encoding="utf-8")))
        except json.JSONDecodeError as e:
            raise ValidationError(f"config file is not valid JSON: {e}") from e
    known = {f.name for f in fields(EngineConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")

    env_casts = {
        "data_dir": str,
        "workers": int,
        "time_budget_s": float,
        "memory_budget_mb": int,
        "checkpoint_interval_s": float,
        "snippet_rows": int,
        "ind_spill_threshold": int,
        "static_dir": str,
        "host": str,
        "port": int,
    }
    for name, cast in env_casts.items():
        raw = os.environ.get(_ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = cast(raw)
    for name, value in overrides.items():
        if value is not None:
            values[name] = value
    return EngineConfig(**values)
