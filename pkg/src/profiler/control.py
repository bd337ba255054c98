"""Cooperative execution control for long-running operations.

Discovery and mining operations accept an optional :class:`RunControl`.
They call :meth:`RunControl.checkpoint` at candidate/cluster granularity,
which is where cancellation and the time budget take effect, and report
coarse progress at phase boundaries.  Memory budgeting is best-effort:
operations account the size of their major data structures (partition
caches, trees) rather than relying on OS enforcement.
"""

from __future__ import annotations

import threading
import time
from typing import Callable, Optional

from .errors import ResourceLimitExceeded, TaskCancelled


class RunControl:
    """Progress, cancellation and budget hooks threaded through executors.

    Safe for concurrent use from multiple worker threads of one operation.
    """

    def __init__(
        self,
        *,
        progress_callback: Optional[Callable[[float], None]] = None,
        cancel_event: Optional[threading.Event] = None,
        time_budget_s: Optional[float] = None,
        memory_budget_bytes: Optional[int] = None,
    ):
        self._progress_callback = progress_callback
        self._cancel_event = cancel_event
        self._deadline = (
            time.monotonic() + time_budget_s if time_budget_s is not None else None
        )
        self._memory_budget = memory_budget_bytes
        self._progress = 0.0
        self._lock = threading.Lock()

    def checkpoint(self) -> None:
        """Raise if the run was cancelled or the time budget is exhausted."""
        if self._cancel_event is not None and self._cancel_event.is_set():
            raise TaskCancelled("task cancelled")
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise ResourceLimitExceeded("time budget exhausted")

    def report_progress(self, fraction: float) -> None:
        """Record progress; values are clamped to [0, 1] and never decrease."""
        with self._lock:
            fraction = min(1.0, max(0.0, fraction))
            if fraction <= self._progress:
                return
            self._progress = fraction
        if self._progress_callback is not None:
            self._progress_callback(fraction)

    @property
    def progress(self) -> float:
        return self._progress

    def account_memory(self, current_bytes: int) -> None:
        """Compare an operation's estimated live allocation to the budget."""
        if self._memory_budget is not None and current_bytes > self._memory_budget:
            raise ResourceLimitExceeded(
                f"memory budget exhausted (~{current_bytes // (1024 * 1024)} MiB "
                f"allocated, budget {self._memory_budget // (1024 * 1024)} MiB)"
            )
