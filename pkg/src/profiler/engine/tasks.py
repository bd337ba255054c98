"""Task lifecycle: submission, bounded parallel execution, progress,
cooperative cancellation, budgets and result retrieval.

One in-process worker pool of W threads executes tasks FIFO.  Task state
transitions only along queued -> running -> {done, failed, cancelled};
progress is monotone.  Executor failures are isolated: an exception
marks that task failed and the engine keeps serving.  Statuses and
results are persisted under the data directory, so a restart restores
terminal tasks and marks anything in flight as failed with a restart
message.
"""

from __future__ import annotations

import json
import queue
import threading
import time
import traceback
import uuid
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .. import arm, fd, ind, mfd, pipeline, stats
from ..control import RunControl
from ..dataset import NullMode, Table
from ..errors import (
    AlreadyFinished,
    NotFinished,
    ProfilerError,
    TaskCancelled,
    UnknownTask,
    ValidationError,
)
from . import results as R
from .config import EngineConfig
from .registry import DatasetRegistry

TASK_KINDS = (
    "discover_fd",
    "validate_fd",
    "validate_mfd",
    "discover_ind",
    "validate_ind",
    "mine_rules",
    "profile_stats",
    "typo_pipeline",
    "apply_fixes",
)

# Parameters every kind accepts; separator/has_header/null_mode override
# the registry entry's general parameters for this run only.
_GENERAL_PARAMS = {
    "separator",
    "has_header",
    "null_mode",
    "thread_count",
    "time_budget_s",
    "memory_budget_mb",
}

_KIND_PARAMS: dict[str, set[str]] = {
    "discover_fd": {"error_threshold", "max_lhs", "algorithm"},
    "validate_fd": {"lhs", "rhs", "error_threshold"},
    "validate_mfd": {"lhs", "rhs", "metric", "delta"},
    "discover_ind": set(),
    "validate_ind": {"dependent", "referenced", "limit"},
    "mine_rules": {"min_support", "min_confidence", "algorithm", "layout"},
    "profile_stats": set(),
    "typo_pipeline": {
        "error_threshold",
        "max_lhs",
        "min_cluster_size",
        "max_clusters_shown",
    },
    "apply_fixes": {"decisions", "name"},
}

_REQUIRED_PARAMS: dict[str, set[str]] = {
    "validate_fd": {"rhs"},
    "validate_mfd": {"rhs", "delta"},
    "validate_ind": {"dependent", "referenced"},
    "typo_pipeline": {"error_threshold"},
    "apply_fixes": {"decisions"},
}


@dataclass(frozen=True)
class TaskSpec:
    kind: str
    dataset_ids: tuple[str, ...]
    params: dict


@dataclass
class TaskStatus:
    task_id: str
    state: str  # queued | running | done | failed | cancelled
    progress: float
    error_message: Optional[str] = None
    error_code: Optional[str] = None
    submitted_at: float = 0.0
    started_at: Optional[float] = None
    finished_at: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "state": self.state,
            "progress": self.progress,
            "error_message": self.error_message,
            "error_code": self.error_code,
            "submitted_at": self.submitted_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }


class _TaskRecord:
    def __init__(self, task_id: str, spec: TaskSpec):
        self.spec = spec
        self.status = TaskStatus(task_id, "queued", 0.0, submitted_at=time.time())
        self.cancel_event = threading.Event()
        self.result: Optional[R.TaskResult] = None
        self.lock = threading.Lock()

    def set_progress(self, fraction: float) -> None:
        with self.lock:
            if fraction > self.status.progress:
                self.status.progress = fraction


def validate_spec(payload: dict, registry: DatasetRegistry) -> TaskSpec:
    """Structural validation: kind, dataset references, parameter surface."""
    if not isinstance(payload, dict):
        raise ValidationError("task spec must be an object")
    kind = payload.get("kind")
    if kind not in TASK_KINDS:
        raise ValidationError(f"unknown task kind {kind!r}; known: {list(TASK_KINDS)}")
    dataset_ids = payload.get("dataset_ids")
    if dataset_ids is None and "dataset_id" in payload:
        dataset_ids = [payload["dataset_id"]]
    if (
        not isinstance(dataset_ids, (list, tuple))
        or not dataset_ids
        or not all(isinstance(d, str) for d in dataset_ids)
    ):
        raise ValidationError("dataset_ids must be a non-empty list of dataset ids")
    for dataset_id in dataset_ids:
        registry.get(dataset_id)  # raises UnknownDataset
    params = payload.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError("params must be an object")
    allowed = _GENERAL_PARAMS | _KIND_PARAMS[kind]
    unknown = set(params) - allowed
    if unknown:
        raise ValidationError(
            f"unknown parameters for {kind}: {sorted(unknown)}; allowed: {sorted(allowed)}"
        )
    missing = _REQUIRED_PARAMS.get(kind, set()) - set(params)
    if missing:
        raise ValidationError(f"missing required parameters for {kind}: {sorted(missing)}")
    _validate_params(kind, params)
    return TaskSpec(kind=kind, dataset_ids=tuple(dataset_ids), params=params)


def _require_range(params: dict, key: str, lo, hi, *, lo_open=False, hi_open=False):
    if key not in params:
        return
    v = params[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ValidationError(f"{key} must be a number")
    if v < lo or v > hi or (lo_open and v == lo) or (hi_open and v == hi):
        raise ValidationError(f"{key}={v} outside valid range")


def _validate_params(kind: str, params: dict) -> None:
    _require_range(params, "error_threshold", 0.0, 1.0, hi_open=True)
    _require_range(params, "min_support", 0.0, 1.0, lo_open=True)
    _require_range(params, "min_confidence", 0.0, 1.0, lo_open=True)
    _require_range(params, "delta", 0.0, float("inf"))
    for key in ("max_lhs", "thread_count", "limit", "min_cluster_size", "max_clusters_shown"):
        if key in params:
            if not isinstance(params[key], int) or isinstance(params[key], bool) or params[key] < 1:
                raise ValidationError(f"{key} must be a positive integer")
    if kind == "typo_pipeline" and params.get("error_threshold") == 0.0:
        raise ValidationError("typo_pipeline needs error_threshold > 0")
    if "null_mode" in params and params["null_mode"] not in [m.value for m in NullMode]:
        raise ValidationError(f"unknown null_mode {params['null_mode']!r}")
    if kind == "discover_fd" and params.get("algorithm", "tane") != "tane":
        raise ValidationError("discover_fd supports algorithm 'tane'")
    if kind == "mine_rules" and params.get("algorithm", "apriori") not in (
        "apriori",
        "fpgrowth",
    ):
        raise ValidationError("mine_rules supports algorithms 'apriori' and 'fpgrowth'")
    if kind == "mine_rules" and params.get("layout", "singular") not in (
        "singular",
        "tabular",
    ):
        raise ValidationError("layout must be 'singular' or 'tabular'")
    if kind == "validate_mfd" and "metric" in params:
        if params["metric"] not in [m.value for m in mfd.MfdMetric]:
            raise ValidationError(f"unknown metric {params['metric']!r}")
    if kind == "apply_fixes":
        decisions = params.get("decisions")
        if not isinstance(decisions, list):
            raise ValidationError("apply_fixes needs a list of decisions")
        for d in decisions:
            if not isinstance(d, dict) or "row" not in d or "column" not in d:
                raise ValidationError("each decision needs row and column")


@dataclass
class TaskContext:
    spec: TaskSpec
    registry: DatasetRegistry
    config: EngineConfig
    control: RunControl

    def load_table(self, index: int = 0) -> Table:
        p = self.spec.params
        return self.registry.load_table(
            self.spec.dataset_ids[index],
            separator=p.get("separator"),
            has_header=p.get("has_header"),
            null_mode=NullMode(p["null_mode"]) if "null_mode" in p else None,
        )

    def resolve_column(self, table: Table, ref) -> int:
        if isinstance(ref, str) and ref.isdigit():
            return table.column_index(int(ref))
        return table.column_index(ref)


# -- executors -----------------------------------------------------------


def _exec_discover_fd(ctx: TaskContext) -> R.TaskResult:
    table = ctx.load_table()
    p = ctx.spec.params
    config = fd.FdDiscoveryConfig(
        max_lhs=p.get("max_lhs", 4),
        error_threshold=p.get("error_threshold", 0.0),
        thread_count=p.get("thread_count", 1),
    )
    fds = fd.discover_fds(table, config, control=ctx.control)
    return R.TaskResult(
        kind="discover_fd",
        items=tuple(R.fd_items(table, fds)),
        summary={"count": len(fds), "dataset": table.name},
    )


def _exec_validate_fd(ctx: TaskContext) -> R.TaskResult:
    table = ctx.load_table()
    p = ctx.spec.params
    lhs = [ctx.resolve_column(table, c) for c in p.get("lhs", [])]
    rhs = ctx.resolve_column(table, p["rhs"])
    report = fd.validate_fd(
        table, lhs, rhs, p.get("error_threshold", 0.0), control=ctx.control
    )
    return R.fd_validation_result(table, lhs, rhs, report)


def _exec_validate_mfd(ctx: TaskContext) -> R.TaskResult:
    table = ctx.load_table()
    p = ctx.spec.params
    query = mfd.MfdQuery(
        lhs=tuple(ctx.resolve_column(table, c) for c in p.get("lhs", [])),
        rhs=tuple(ctx.resolve_column(table, c) for c in p["rhs"]),
        metric=mfd.MfdMetric(p.get("metric", "absolute-difference")),
        delta=float(p.get("delta", 0.0)),
    )
    return R.mfd_validation_result(mfd.validate_mfd(table, query, control=ctx.control))


def _exec_discover_ind(ctx: TaskContext) -> R.TaskResult:
    tables = [ctx.load_table(i) for i in range(len(ctx.spec.dataset_ids))]
    inds = ind.discover_unary_inds(
        tables,
        spill_threshold=ctx.config.ind_spill_threshold,
        control=ctx.control,
    )
    return R.TaskResult(
        kind="discover_ind",
        items=tuple(R.ind_items(inds)),
        summary={"count": len(inds), "tables": [t.name for t in tables]},
    )


def _exec_validate_ind(ctx: TaskContext) -> R.TaskResult:
    tables = [ctx.load_table(i) for i in range(len(ctx.spec.dataset_ids))]
    p = ctx.spec.params

    def column_ref(side: dict) -> ind.ColumnRef:
        if not isinstance(side, dict) or "table" not in side or "column" not in side:
            raise ValidationError("dependent/referenced need table and column")
        table = next((t for t in tables if t.name == side["table"]), None)
        if table is None:
            from ..errors import UnknownTable

            raise UnknownTable(f"no table named {side['table']!r} among the datasets")
        col = table.column_index(side["column"])
        return ind.ColumnRef(table.name, col, table.columns[col].name)

    the_ind = ind.Ind(column_ref(p["dependent"]), column_ref(p["referenced"]))
    holds, missing = ind.validate_ind(the_ind, tables, limit=p.get("limit", 10))
    return R.TaskResult(
        kind="validate_ind",
        items=tuple(
            R.ResultItem(text=v, payload={"missing_value": v}, sort_values={"value": v})
            for v in missing
        ),
        summary={"holds": holds, "ind": the_ind.render(), "missing_sample": missing},
    )


def _exec_mine_rules(ctx: TaskContext) -> R.TaskResult:
    p = ctx.spec.params
    entry = ctx.registry.get(ctx.spec.dataset_ids[0])
    text = entry.path.read_text(encoding="utf-8")
    txns = arm.load_transactions_text(
        text,
        separator=p.get("separator", entry.separator),
        has_header=p.get("has_header", entry.has_header),
        layout=p.get("layout", "singular"),
    )
    itemsets = arm.mine_frequent_itemsets(
        txns,
        p.get("min_support", 0.1),
        p.get("algorithm", "apriori"),
        control=ctx.control,
    )
    items = R.itemset_items(txns, itemsets)
    rules = []
    if "min_confidence" in p:
        rules = arm.derive_rules(itemsets, p["min_confidence"], control=ctx.control)
        items += R.rule_items(txns, rules)
    return R.TaskResult(
        kind="mine_rules",
        items=tuple(items),
        summary={
            "itemset_count": len(itemsets),
            "rule_count": len(rules),
            "transaction_count": len(txns.transactions),
        },
    )


def _exec_profile_stats(ctx: TaskContext) -> R.TaskResult:
    table = ctx.load_table()
    column_stats = stats.profile_table(table)
    return R.TaskResult(
        kind="profile_stats",
        items=tuple(R.stats_items(column_stats)),
        summary={"columns": len(column_stats), "rows": table.row_count},
    )


def _exec_typo_pipeline(ctx: TaskContext) -> R.TaskResult:
    table = ctx.load_table()
    p = ctx.spec.params
    config = pipeline.TypoPipelineConfig(
        error_threshold=p.get("error_threshold", 0.05),
        max_lhs=p.get("max_lhs", 3),
        min_cluster_size=p.get("min_cluster_size", 2),
        max_clusters_shown=p.get("max_clusters_shown", 50),
        thread_count=p.get("thread_count", 1),
    )
    found = pipeline.find_typo_candidates(table, config, control=ctx.control)
    return R.TaskResult(
        kind="typo_pipeline",
        items=tuple(R.typo_items(table, found)),
        summary={
            "fd_count": len(found),
            "cluster_count": sum(len(c) for _, c in found),
            "dataset_id": ctx.spec.dataset_ids[0],
        },
    )


def _exec_apply_fixes(ctx: TaskContext) -> R.TaskResult:
    p = ctx.spec.params
    decisions = [
        pipeline.FixDecision(
            row_index=d["row"],
            column_index=d["column"],
            replacement=d.get("replacement"),
            keep=bool(d.get("keep", False)),
        )
        for d in p["decisions"]
    ]
    entry = ctx.registry.apply_fixes(
        ctx.spec.dataset_ids[0], decisions, name=p.get("name")
    )
    return R.TaskResult(
        kind="apply_fixes",
        items=(
            R.ResultItem(
                text=f"revision {entry.dataset_id} of {ctx.spec.dataset_ids[0]}",
                payload=entry.to_json(),
            ),
        ),
        summary={"new_dataset_id": entry.dataset_id, "parent_id": ctx.spec.dataset_ids[0]},
    )


EXECUTORS: dict[str, Callable[[TaskContext], R.TaskResult]] = {
    "discover_fd": _exec_discover_fd,
    "validate_fd": _exec_validate_fd,
    "validate_mfd": _exec_validate_mfd,
    "discover_ind": _exec_discover_ind,
    "validate_ind": _exec_validate_ind,
    "mine_rules": _exec_mine_rules,
    "profile_stats": _exec_profile_stats,
    "typo_pipeline": _exec_typo_pipeline,
    "apply_fixes": _exec_apply_fixes,
}


class TaskManager:
    """Bounded worker pool with persisted task statuses and results."""

    def __init__(self, registry: DatasetRegistry, config: EngineConfig):
        self._registry = registry
        self._config = config
        self._tasks: dict[str, _TaskRecord] = {}
        self._queue: "queue.Queue[str]" = queue.Queue()
        self._lock = threading.RLock()
        self._tasks_dir = config.data_dir / "tasks"
        self._tasks_dir.mkdir(parents=True, exist_ok=True)
        self._restore_from_disk()
        self._shutdown = False
        self._workers = [
            threading.Thread(target=self._worker_loop, name=f"task-worker-{i}", daemon=True)
            for i in range(config.workers)
        ]
        for w in self._workers:
            w.start()

    # -- public API ------------------------------------------------------

    def submit(self, payload: dict) -> str:
        spec = validate_spec(payload, self._registry)
        task_id = "task-" + uuid.uuid4().hex[:12]
        record = _TaskRecord(task_id, spec)
        with self._lock:
            self._tasks[task_id] = record
        self._persist(record, spec=payload)
        self._queue.put(task_id)
        return task_id

    def status(self, task_id: str) -> TaskStatus:
        return self._record(task_id).status

    def result_page(
        self,
        task_id: str,
        *,
        sort: Optional[str] = None,
        regex_filter: Optional[str] = None,
        page: int = 0,
        page_size: int = 50,
    ) -> R.ResultPage:
        record = self._record(task_id)
        with record.lock:
            state = record.status.state
            result = record.result
        if state != "done":
            raise NotFinished(f"task {task_id} is {state}, not done")
        if result is None:
            result = self._load_result(task_id)
            with record.lock:
                record.result = result
        return R.paginate(
            result, sort=sort, regex_filter=regex_filter, page=page, page_size=page_size
        )

    def result_summary(self, task_id: str) -> dict:
        record = self._record(task_id)
        with record.lock:
            if record.status.state == "done" and record.result is None:
                record.result = self._load_result(task_id)
            return dict(record.result.summary) if record.result else {}

    def result_kind(self, task_id: str) -> Optional[str]:
        record = self._record(task_id)
        with record.lock:
            return record.result.kind if record.result else None

    def cancel(self, task_id: str) -> TaskStatus:
        record = self._record(task_id)
        with record.lock:
            state = record.status.state
            if state in ("done", "failed", "cancelled"):
                raise AlreadyFinished(f"task {task_id} already {state}")
            record.cancel_event.set()
            if state == "queued":
                self._finish(record, "cancelled", locked=True)
        return record.status

    def wait(self, task_id: str, timeout: float = 60.0) -> TaskStatus:
        """Poll until the task reaches a terminal state (test/CLI helper)."""
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            status = self.status(task_id)
            if status.state in ("done", "failed", "cancelled"):
                return status
            time.sleep(0.01)
        return self.status(task_id)

    def shutdown(self) -> None:
        self._shutdown = True
        for _ in self._workers:
            self._queue.put("")
        for w in self._workers:
            w.join(timeout=2.0)

    # -- internals -------------------------------------------------------

    def _record(self, task_id: str) -> _TaskRecord:
        with self._lock:
            record = self._tasks.get(task_id)
        if record is None:
            raise UnknownTask(f"no task with id {task_id!r}")
        return record

    def _worker_loop(self) -> None:
        while not self._shutdown:
            task_id = self._queue.get()
            if not task_id:
                break
            try:
                record = self._record(task_id)
            except UnknownTask:
                continue
            with record.lock:
                if record.status.state != "queued":
                    continue
                if record.cancel_event.is_set():
                    self._finish(record, "cancelled", locked=True)
                    continue
                record.status.state = "running"
                record.status.started_at = time.time()
            self._run_task(record)

    def _run_task(self, record: _TaskRecord) -> None:
        params = record.spec.params
        time_budget = params.get("time_budget_s", self._config.time_budget_s)
        memory_mb = params.get("memory_budget_mb", self._config.memory_budget_mb)
        control = RunControl(
            progress_callback=record.set_progress,
            cancel_event=record.cancel_event,
            time_budget_s=time_budget,
            memory_budget_bytes=memory_mb * 1024 * 1024 if memory_mb else None,
        )
        ctx = TaskContext(record.spec, self._registry, self._config, control)
        try:
            result = EXECUTORS[record.spec.kind](ctx)
        except TaskCancelled:
            self._finish(record, "cancelled")
        except ProfilerError as e:
            self._finish(record, "failed", message=str(e), code=e.code)
        except Exception as e:  # executor fault: isolate, keep serving
            self._finish(
                record,
                "failed",
                message=f"{type(e).__name__}: {e}",
                code="INTERNAL",
            )
            traceback.print_exc()
        else:
            with record.lock:
                record.result = result
                record.status.state = "done"
                record.status.progress = 1.0
                record.status.finished_at = time.time()
            self._persist(record, result=result)

    def _finish(
        self,
        record: _TaskRecord,
        state: str,
        *,
        message: Optional[str] = None,
        code: Optional[str] = None,
        locked: bool = False,
    ) -> None:
        def apply():
            record.status.state = state
            record.status.error_message = message
            record.status.error_code = code
            record.status.finished_at = time.time()

        if locked:
            apply()
        else:
            with record.lock:
                apply()
        self._persist(record)

    # -- persistence -----------------------------------------------------

    def _task_dir(self, task_id: str):
        return self._tasks_dir / task_id

    def _persist(
        self,
        record: _TaskRecord,
        *,
        spec: Optional[dict] = None,
        result: Optional[R.TaskResult] = None,
    ) -> None:
        d = self._task_dir(record.status.task_id)
        d.mkdir(parents=True, exist_ok=True)
        (d / "status.json").write_text(
            json.dumps(record.status.to_json()), encoding="utf-8"
        )
        if spec is not None:
            (d / "spec.json").write_text(json.dumps(spec), encoding="utf-8")
        if result is not None:
            payload = {
                "kind": result.kind,
                "summary": result.summary,
                "items": [
                    {
                        "text": it.text,
                        "payload": it.payload,
                        "sort_values": {
                            k: list(v) if isinstance(v, tuple) else v
                            for k, v in it.sort_values.items()
                        },
                    }
                    for it in result.items
                ],
            }
            (d / "result.json").write_text(json.dumps(payload), encoding="utf-8")

    def _load_result(self, task_id: str) -> R.TaskResult:
        path = self._task_dir(task_id) / "result.json"
        if not path.exists():
            raise NotFinished(f"result of task {task_id} is not available")
        data = json.loads(path.read_text(encoding="utf-8"))
        return R.TaskResult(
            kind=data["kind"],
            items=tuple(
                R.ResultItem(
                    text=it["text"],
                    payload=it["payload"],
                    sort_values={
                        k: tuple(v) if isinstance(v, list) else v
                        for k, v in it["sort_values"].items()
                    },
                )
                for it in data["items"]
            ),
            summary=data["summary"],
        )

    def _restore_from_disk(self) -> None:
        for status_path in sorted(self._tasks_dir.glob("*/status.json")):
            try:
                data = json.loads(status_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError):
                continue
            task_id = data.get("task_id")
            if not task_id:
                continue
            spec_path = status_path.parent / "spec.json"
            spec_payload: dict[str, Any] = {}
            if spec_path.exists():
                try:
                    spec_payload = json.loads(spec_path.read_text(encoding="utf-8"))
                except (OSError, json.JSONDecodeError):
                    spec_payload = {}
            record = _TaskRecord(
                task_id,
                TaskSpec(
                    kind=spec_payload.get("kind", "unknown"),
                    dataset_ids=tuple(spec_payload.get("dataset_ids", ())),
                    params=spec_payload.get("params", {}),
                ),
            )
            record.status = TaskStatus(
                task_id=task_id,
                state=data["state"],
                progress=data["progress"],
                error_message=data.get("error_message"),
                error_code=data.get("error_code"),
                submitted_at=data.get("submitted_at", 0.0),
                started_at=data.get("started_at"),
                finished_at=data.get("finished_at"),
            )
            if record.status.state in ("queued", "running"):
                record.status.state = "failed"
                record.status.error_message = "engine restarted while the task was in flight"
                record.status.error_code = "RESTARTED"
                record.status.finished_at = time.time()
                self._tasks[task_id] = record
                self._persist(record)
            else:
                self._tasks[task_id] = record
