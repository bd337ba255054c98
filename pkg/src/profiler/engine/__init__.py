"""Task engine: dataset registry, worker pool, HTTP API, configuration."""

from __future__ import annotations

from .config import EngineConfig, load_config
from .registry import DatasetEntry, DatasetRegistry
from .tasks import TASK_KINDS, TaskManager, TaskSpec, TaskStatus, validate_spec


class Engine:
    """One profiler engine instance: registry plus task manager."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self.registry = DatasetRegistry(config)
        self.tasks = TaskManager(self.registry, config)

    def close(self) -> None:
        self.tasks.shutdown()


__all__ = [
    "Engine",
    "EngineConfig",
    "load_config",
    "DatasetEntry",
    "DatasetRegistry",
    "TaskManager",
    "TaskSpec",
    "TaskStatus",
    "TASK_KINDS",
    "validate_spec",
]
