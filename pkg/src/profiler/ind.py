"""Unary inclusion dependency discovery and validation.

Discovery runs a simultaneous sorted merge over the distinct value sets
of every attribute: values are consumed in global sorted order, and for
each value the candidate referenced-attribute set of every attribute
containing it is intersected with the group of attributes sharing that
value.  An attribute's candidates therefore survive only if they contain
every one of its values, which yields exactly the holding inclusions.

Values are compared as raw text ("01" and "1" differ) and nulls never
participate on either side.  Distinct value sets are held in memory up
to a configurable row threshold and spilled to sorted temp files above
it; the merge consumes plain iterators either way.
"""

from __future__ import annotations

import heapq
import json
import os
import tempfile
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .control import RunControl
from .dataset import Table
from .errors import UnknownColumn, UnknownTable, ValidationError

DEFAULT_SPILL_THRESHOLD = 1_000_000


@dataclass(frozen=True)
class ColumnRef:
    table: str
    column_index: int
    column_name: str

    def render(self) -> str:
        return f"{self.table}.{self.column_name}"


@dataclass(frozen=True)
class Ind:
    """dependent ⊆ referenced over single columns."""

    dependent: ColumnRef
    referenced: ColumnRef

    def render(self) -> str:
        return f"{self.dependent.render()} ⊆ {self.referenced.render()}"


def _distinct_sorted(table: Table, col: int) -> list[str]:
    return sorted(v for v in table.columns[col].dictionary if v is not None)


def _spill(values: list[str]) -> str:
    """Write sorted values to a temp file, one JSON string per line."""
    fd, path = tempfile.mkstemp(prefix="ind-spill-", suffix=".jsonl")
    with os.fdopen(fd, "w", encoding="utf-8") as f:
        for v in values:
            f.write(json.dumps(v))
            f.write("\n")
    return path


def _stream_file(path: str) -> Iterator[str]:
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            yield json.loads(line)


def discover_unary_inds(
    tables: Sequence[Table],
    *,
    spill_threshold: int = DEFAULT_SPILL_THRESHOLD,
    control: Optional[RunControl] = None,
) -> list[Ind]:
    """All holding unary inclusions over every attribute pair.

    An attribute with zero non-null values is vacuously included in every
    other attribute.  Output is ordered by dependent then referenced
    attribute, following the input table order.
    """
    if not tables:
        raise ValidationError("at least one table is required")
    names = [t.name for t in tables]
    if len(set(names)) != len(names):
        raise ValidationError("table names must be unique within one discovery call")
    attrs: list[tuple[int, int]] = [
        (ti, ci) for ti, t in enumerate(tables) for ci in range(len(t.columns))
    ]
    if len(attrs) < 2:
        raise ValidationError("at least two columns are required")

    spill_paths: list[str] = []
    streams: list[Iterator[str]] = []
    try:
        for ti, ci in attrs:
            values = _distinct_sorted(tables[ti], ci)
            if len(values) > spill_threshold:
                path = _spill(values)
                spill_paths.append(path)
                streams.append(_stream_file(path))
            else:
                streams.append(iter(values))

        all_ids = frozenset(range(len(attrs)))
        refs: dict[int, set[int]] = {a: set(all_ids) for a in range(len(attrs))}

        heap: list[tuple[str, int]] = []
        for a, stream in enumerate(streams):
            first = next(stream, None)
            if first is not None:
                heapq.heappush(heap, (first, a))

        while heap:
            if control is not None:
                control.checkpoint()
            value, a = heapq.heappop(heap)
            group = [a]
            while heap and heap[0][0] == value:
                group.append(heapq.heappop(heap)[1])
            group_set = set(group)
            for member in group:
                if refs[member]:
                    refs[member] &= group_set
            for member in group:
                nxt = next(streams[member], None)
                if nxt is not None:
                    heapq.heappush(heap, (nxt, member))
    finally:
        for path in spill_paths:
            try:
                os.unlink(path)
            except OSError:
                pass

    out = []
    for a, (ti, ci) in enumerate(attrs):
        dep = ColumnRef(tables[ti].name, ci, tables[ti].columns[ci].name)
        for b in sorted(refs[a] - {a}):
            tj, cj = attrs[b]
            out.append(Ind(dep, ColumnRef(tables[tj].name, cj, tables[tj].columns[cj].name)))
    return out


def _resolve(tables: Sequence[Table], ref: ColumnRef) -> tuple[Table, int]:
    for t in tables:
        if t.name == ref.table:
            if not 0 <= ref.column_index < len(t.columns):
                raise UnknownColumn(
                    f"table {ref.table!r} has no column index {ref.column_index}"
                )
            return t, ref.column_index
    raise UnknownTable(f"no table named {ref.table!r}")


def validate_ind(
    ind: Ind,
    tables: Sequence[Table],
    *,
    limit: int = 10,
) -> tuple[bool, list[str]]:
    """Check one inclusion; on failure list up to ``limit`` missing values.

    Missing values are the distinct non-null dependent values absent from
    the referenced column, in sorted order.
    """
    dep_table, dep_col = _resolve(tables, ind.dependent)
    ref_table, ref_col = _resolve(tables, ind.referenced)
    referenced = {v for v in ref_table.columns[ref_col].dictionary if v is not None}
    missing = [
        v for v in _distinct_sorted(dep_table, dep_col) if v not in referenced
    ]
    return not missing, missing[:limit]
