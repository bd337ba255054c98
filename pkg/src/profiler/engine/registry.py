"""File-backed dataset registry: uploads, built-ins and fix revisions.

Layout under the data directory::

    datasets/<dataset_id>/data.csv   # the CSV bytes
    datasets/<dataset_id>/meta.json  # entry metadata incl. lineage

Built-in datasets ship with the package and are registered read-only on
startup with stable ids.  Revisions are produced by applying fix
decisions to a parent dataset; they form a tree rooted at an upload or a
built-in, and the registry is fully reconstructed from disk on restart.
"""

from __future__ import annotations

import errno
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .. import pipeline
from ..dataset import NullMode, Table, infer_types, parse_csv_text, serialize_csv
from ..errors import StaleDecision, StorageFull, UnknownDataset
from .config import EngineConfig

_BUILTINS = [
    ("city_temperatures.csv", ",", True),
    ("customer_addresses.csv", ",", True),
    ("retail_baskets.csv", ",", True),
    ("orders.csv", ",", True),
]


@dataclass
class DatasetEntry:
    dataset_id: str
    name: str
    origin: str  # "built-in" | "uploaded" | "revision"
    parent_id: Optional[str]
    path: Path
    separator: str
    has_header: bool
    null_mode: NullMode
    row_count: int
    column_count: int
    size_bytes: int
    created_at: float
    modified_rows: tuple[int, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "name": self.name,
            "origin": self.origin,
            "parent_id": self.parent_id,
            "separator": self.separator,
            "has_header": self.has_header,
            "null_mode": self.null_mode.value,
            "row_count": self.row_count,
            "column_count": self.column_count,
            "size_bytes": self.size_bytes,
            "created_at": self.created_at,
            "modified_rows": list(self.modified_rows),
        }


class DatasetRegistry:
    """Thread-safe dataset catalog persisted under the data directory."""

    def __init__(self, config: EngineConfig):
        self._config = config
        self._lock = threading.RLock()
        self._entries: dict[str, DatasetEntry] = {}
        self._datasets_dir = config.data_dir / "datasets"
        self._datasets_dir.mkdir(parents=True, exist_ok=True)
        self._register_builtins()
        self._restore_from_disk()

    # -- lookup ----------------------------------------------------------

    def list_entries(self) -> list[DatasetEntry]:
        with self._lock:
            return sorted(self._entries.values(), key=lambda e: (e.created_at, e.dataset_id))

    def get(self, dataset_id: str) -> DatasetEntry:
        with self._lock:
            entry = self._entries.get(dataset_id)
        if entry is None:
            raise UnknownDataset(f"no dataset with id {dataset_id!r}")
        return entry

    def load_table(
        self,
        dataset_id: str,
        *,
        separator: Optional[str] = None,
        has_header: Optional[bool] = None,
        null_mode: Optional[NullMode] = None,
    ) -> Table:
        """Parse a registered dataset, optionally overriding general params."""
        entry = self.get(dataset_id)
        text = entry.path.read_text(encoding="utf-8")
        table = parse_csv_text(
            text,
            separator=separator if separator is not None else entry.separator,
            has_header=has_header if has_header is not None else entry.has_header,
            null_mode=null_mode if null_mode is not None else entry.null_mode,
            name=entry.name,
        )
        return infer_types(table)

    def snippet(self, dataset_id: str) -> dict:
        """Header plus the first K rows, for the dataset preview."""
        entry = self.get(dataset_id)
        table = self.load_table(dataset_id)
        k = self._config.snippet_rows
        return {
            "dataset_id": entry.dataset_id,
            "columns": list(table.column_names),
            "rows": [list(table.row(r)) for r in range(min(k, table.row_count))],
            "row_count": table.row_count,
        }

    # -- registration ----------------------------------------------------

    def upload(
        self,
        content: bytes,
        name: str,
        separator: str = ",",
        has_header: bool = True,
        null_mode: NullMode = NullMode.NULL_EQUAL,
    ) -> DatasetEntry:
        """Validate, persist and register an uploaded CSV.

        Rejected content registers nothing.  Duplicate names are fine:
        ids, not names, are the keys.
        """
        text = content.decode("utf-8")
        table = parse_csv_text(
            text, separator=separator, has_header=has_header, null_mode=null_mode, name=name
        )
        dataset_id = "ds-" + uuid.uuid4().hex[:12]
        entry = DatasetEntry(
            dataset_id=dataset_id,
            name=name,
            origin="uploaded",
            parent_id=None,
            path=self._datasets_dir / dataset_id / "data.csv",
            separator=separator,
            has_header=has_header,
            null_mode=null_mode,
            row_count=table.row_count,
            column_count=len(table.columns),
            size_bytes=len(content),
            created_at=time.time(),
        )
        self._persist(entry, text)
        with self._lock:
            self._entries[dataset_id] = entry
        return entry

    def apply_fixes(
        self,
        dataset_id: str,
        decisions: Sequence[pipeline.FixDecision],
        *,
        name: Optional[str] = None,
    ) -> DatasetEntry:
        """Apply fix decisions to a dataset, producing a child revision.

        Raises StaleDecision when any referenced row was already modified
        by an existing revision of the same parent (e.g. a second tab
        fixing the same cluster).
        """
        parent = self.get(dataset_id)
        touched = {d.row_index for d in decisions if not d.keep}
        with self._lock:
            for other in self._entries.values():
                if other.parent_id == dataset_id and touched & set(other.modified_rows):
                    raise StaleDecision(
                        f"rows {sorted(touched & set(other.modified_rows))} were already "
                        f"modified by revision {other.dataset_id}"
                    )
        table = self.load_table(dataset_id)
        revised = pipeline.apply_fixes(table, decisions, name=name or f"{parent.name} (fixed)")
        text = serialize_csv(revised)
        revision_id = "ds-" + uuid.uuid4().hex[:12]
        entry = DatasetEntry(
            dataset_id=revision_id,
            name=revised.name,
            origin="revision",
            parent_id=dataset_id,
            path=self._datasets_dir / revision_id / "data.csv",
            separator=parent.separator,
            has_header=parent.has_header,
            null_mode=parent.null_mode,
            row_count=revised.row_count,
            column_count=len(revised.columns),
            size_bytes=len(text.encode("utf-8")),
            created_at=time.time(),
            modified_rows=tuple(sorted(touched)),
        )
        self._persist(entry, text)
        with self._lock:
            self._entries[revision_id] = entry
        return entry

    # -- persistence -----------------------------------------------------

    def _persist(self, entry: DatasetEntry, text: str) -> None:
        try:
            entry.path.parent.mkdir(parents=True, exist_ok=True)
            entry.path.write_text(text, encoding="utf-8")
            meta = entry.path.parent / "meta.json"
            meta.write_text(json.dumps(entry.to_json(), indent=2), encoding="utf-8")
        except OSError as e:
            if e.errno == errno.ENOSPC:
                raise StorageFull("data directory is out of space") from e
            raise

    def _register_builtins(self) -> None:
        package_dir = resources.files("profiler") / "builtin_data"
        for filename, separator, has_header in _BUILTINS:
            resource = package_dir / filename
            stem = filename.rsplit(".", 1)[0]
            dataset_id = f"builtin-{stem}"
            text = resource.read_text(encoding="utf-8")
            table = parse_csv_text(
                text, separator=separator, has_header=has_header, name=stem
            )
            target = self._datasets_dir / dataset_id / "data.csv"
            entry = DatasetEntry(
                dataset_id=dataset_id,
                name=stem,
                origin="built-in",
                parent_id=None,
                path=target,
                separator=separator,
                has_header=has_header,
                null_mode=NullMode.NULL_EQUAL,
                row_count=table.row_count,
                column_count=len(table.columns),
                size_bytes=len(text.encode("utf-8")),
                created_at=0.0,
            )
            if not target.exists():
                self._persist(entry, text)
            self._entries[dataset_id] = entry

    def _restore_from_disk(self) -> None:
        for meta_path in sorted(self._datasets_dir.glob("*/meta.json")):
            try:
                meta = json.loads(meta_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError):
                continue
            dataset_id = meta.get("dataset_id")
            if not dataset_id or dataset_id in self._entries:
                continue
            data_path = meta_path.parent / "data.csv"
            if not data_path.exists():
                continue
            self._entries[dataset_id] = DatasetEntry(
                dataset_id=dataset_id,
                name=meta["name"],
                origin=meta["origin"],
                parent_id=meta.get("parent_id"),
                path=data_path,
                separator=meta["separator"],
                has_header=meta["has_header"],
                null_mode=NullMode(meta.get("null_mode", "null-equal")),
                row_count=meta["row_count"],
                column_count=meta["column_count"],
                size_bytes=meta["size_bytes"],
                created_at=meta["created_at"],
                modified_rows=tuple(meta.get("modified_rows", [])),
            )
