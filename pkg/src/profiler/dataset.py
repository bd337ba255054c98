"""CSV ingestion, dictionary encoding and stripped partitions.

A :class:`Table` is an immutable columnar view of a CSV file.  Every
column stores its cells as integer dictionary codes assigned in
first-occurrence order, which makes equality checks cheap and output
deterministic across runs.  Equality on a column set is represented as a
:class:`StrippedPartition`: the clusters of row indexes that agree on
those columns, with singleton clusters removed.

Null semantics are configurable per table:

* ``null-equal`` (default): all nulls in a column form one equality
  class and receive a dictionary code like any value.
* ``null-distinct``: every null is unique; null cells carry no code and
  never appear in any partition cluster.

An empty unquoted CSV field is null; the quoted two-character field
``""`` is the empty text value.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .errors import (
    EmptyInput,
    IndexOutOfRange,
    MalformedCsv,
    SourceMismatch,
    ValidationError,
)

NULL_CODE = -1

_INT_RE = re.compile(r"^[+-]?[0-9]+$")
_REAL_RE = re.compile(r"^[+-]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?$")


class NullMode(str, enum.Enum):
    NULL_EQUAL = "null-equal"
    NULL_DISTINCT = "null-distinct"


class ColumnType(str, enum.Enum):
    INTEGER = "integer"
    REAL = "real"
    TEXT = "text"
    EMPTY = "empty"


@dataclass(frozen=True)
class Column:
    """One table column: dictionary-encoded cells plus null bookkeeping.

    ``codes[row]`` is the dictionary code of the cell, or ``NULL_CODE``
    for a null cell under null-distinct mode.  ``dictionary[code]`` is
    the original raw value (``None`` for the shared null class under
    null-equal mode).
    """

    name: str
    inferred_type: ColumnType
    codes: tuple[int, ...]
    null_positions: frozenset[int]
    dictionary: tuple[Optional[str], ...]

    def decode(self, row: int) -> Optional[str]:
        """Raw value of one cell (``None`` for null)."""
        if row in self.null_positions:
            return None
        return self.dictionary[self.codes[row]]

    @property
    def distinct_count(self) -> int:
        """Number of distinct non-null values."""
        return sum(1 for v in self.dictionary if v is not None)


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[Column, ...]
    row_count: int
    has_header: bool
    separator: str
    null_mode: NullMode = NullMode.NULL_EQUAL

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def column_index(self, ref: "int | str") -> int:
        """Resolve a column by index or name."""
        if isinstance(ref, int):
            if not 0 <= ref < len(self.columns):
                raise IndexOutOfRange(f"column index {ref} out of range")
            return ref
        for i, c in enumerate(self.columns):
            if c.name == ref:
                return i
        raise IndexOutOfRange(f"no column named {ref!r}")

    def cell(self, row: int, col: int) -> Optional[str]:
        if not 0 <= row < self.row_count:
            raise IndexOutOfRange(f"row index {row} out of range")
        if not 0 <= col < len(self.columns):
            raise IndexOutOfRange(f"column index {col} out of range")
        return self.columns[col].decode(row)

    def row(self, row: int) -> tuple[Optional[str], ...]:
        return tuple(self.cell(row, c) for c in range(len(self.columns)))

    def rows(self) -> list[tuple[Optional[str], ...]]:
        return [self.row(r) for r in range(self.row_count)]

    @staticmethod
    def from_rows(
        name: str,
        header: Sequence[str],
        rows: Sequence[Sequence[Optional[str]]],
        *,
        has_header: bool = True,
        separator: str = ",",
        null_mode: NullMode = NullMode.NULL_EQUAL,
    ) -> "Table":
        """Build a table from already-split cells (``None`` marks null)."""
        width = len(header)
        for i, r in enumerate(rows):
            if len(r) != width:
                raise MalformedCsv(i, f"expected {width} fields, got {len(r)}")
        columns = []
        for ci, col_name in enumerate(_dedupe_names(list(header))):
            columns.append(_encode_column(col_name, [r[ci] for r in rows], null_mode))
        return Table(
            name=name,
            columns=tuple(columns),
            row_count=len(rows),
            has_header=has_header,
            separator=separator,
            null_mode=null_mode,
        )


@dataclass(frozen=True)
class StrippedPartition:
    """Row-index clusters of size >= 2 induced by equality on a column set.

    Clusters are canonically ordered: rows ascending within a cluster,
    clusters ascending by their first row.
    """

    clusters: tuple[tuple[int, ...], ...]
    over_columns: frozenset[int]
    source_row_count: int

    @staticmethod
    def from_clusters(
        clusters: Iterable[Iterable[int]],
        over_columns: Iterable[int],
        source_row_count: int,
    ) -> "StrippedPartition":
        canon = sorted(t for t in (tuple(sorted(c)) for c in clusters) if len(t) >= 2)
        return StrippedPartition(
            clusters=tuple(canon),
            over_columns=frozenset(over_columns),
            source_row_count=source_row_count,
        )

    def cluster_sets(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(c) for c in self.clusters)

    @property
    def total_rows(self) -> int:
        """Sum of cluster sizes (rows not in any cluster are singletons)."""
        return sum(len(c) for c in self.clusters)

    @property
    def error_count(self) -> int:
        """Rows that must be removed to make the column set a key."""
        return self.total_rows - len(self.clusters)


def _dedupe_names(names: list[str]) -> list[str]:
    seen: set[str] = set()
    out = []
    for n in names:
        candidate = n
        k = 1
        while candidate in seen:
            candidate = f"{n}_{k}"
            k += 1
        seen.add(candidate)
        out.append(candidate)
    return out


def _encode_column(name: str, cells: Sequence[Optional[str]], null_mode: NullMode) -> Column:
    codes = []
    dictionary: list[Optional[str]] = []
    by_value: dict[str, int] = {}
    null_positions = set()
    null_code: Optional[int] = None
    for row, value in enumerate(cells):
        if value is None:
            null_positions.add(row)
            if null_mode is NullMode.NULL_EQUAL:
                if null_code is None:
                    null_code = len(dictionary)
                    dictionary.append(None)
                codes.append(null_code)
            else:
                codes.append(NULL_CODE)
        else:
            code = by_value.get(value)
            if code is None:
                code = len(dictionary)
                by_value[value] = code
                dictionary.append(value)
            codes.append(code)
    return Column(
        name=name,
        inferred_type=_infer_column_type(dictionary),
        codes=tuple(codes),
        null_positions=frozenset(null_positions),
        dictionary=tuple(dictionary),
    )


def _infer_column_type(values: Iterable[Optional[str]]) -> ColumnType:
    non_null = [v for v in values if v is not None]
    if not non_null:
        return ColumnType.EMPTY
    if all(_INT_RE.match(v) for v in non_null):
        return ColumnType.INTEGER
    if all(_REAL_RE.match(v) for v in non_null):
        return ColumnType.REAL
    return ColumnType.TEXT


def infer_types(table: Table) -> Table:
    """Re-label every column as integer/real/text/empty from its values.

    Inference is total; columns are encoded once and only the label is
    recomputed, so the result shares the original dictionaries.
    """
    new_columns = tuple(
        replace(c, inferred_type=_infer_column_type(c.dictionary)) for c in table.columns
    )
    return replace(table, columns=new_columns)


def _check_separator(separator: str) -> None:
    if len(separator) != 1 or not separator.isprintable() or separator == '"':
        raise ValidationError(
            f"separator must be a single printable character, got {separator!r}"
        )


def _split_csv(text: str, separator: str) -> list[list[tuple[str, bool]]]:
    """RFC 4180 field splitting with a configurable separator.

    Returns per row a list of ``(value, was_quoted)`` pairs; quoting
    information is needed to distinguish the null field from the quoted
    empty string.  Row indexes in errors are physical 0-based rows.
    """
    rows: list[list[tuple[str, bool]]] = []
    fields: list[tuple[str, bool]] = []
    i = 0
    n = len(text)
    if n == 0:
        return rows
    while True:
        row_index = len(rows)
        if i < n and text[i] == '"':
            # Quoted field: doubled quotes escape a literal quote.
            buf = []
            i += 1
            closed = False
            while i < n:
                ch = text[i]
                if ch == '"':
                    if i + 1 < n and text[i + 1] == '"':
                        buf.append('"')
                        i += 2
                        continue
                    i += 1
                    closed = True
                    break
                buf.append(ch)
                i += 1
            if not closed:
                raise MalformedCsv(row_index, "unterminated quoted field")
            if i < n and text[i] not in (separator, "\n", "\r"):
                raise MalformedCsv(
                    row_index, f"unexpected character {text[i]!r} after closing quote"
                )
            fields.append(("".join(buf), True))
        else:
            start = i
            while i < n and text[i] not in (separator, "\n", "\r"):
                i += 1
            fields.append((text[start:i], False))
        if i >= n:
            rows.append(fields)
            break
        ch = text[i]
        if ch == separator:
            i += 1
            continue
        # Row terminator: \r\n, \n or bare \r.
        i += 2 if ch == "\r" and i + 1 < n and text[i + 1] == "\n" else 1
        rows.append(fields)
        fields = []
        if i >= n:
            break
    return rows


def parse_csv(
    path: str,
    separator: str = ",",
    has_header: bool = True,
    *,
    null_mode: NullMode = NullMode.NULL_EQUAL,
    name: Optional[str] = None,
    encoding: str = "utf-8",
) -> Table:
    """Parse a UTF-8 CSV file into an immutable typed table.

    Quoting follows RFC 4180 with the configured separator.  Ragged rows
    and unterminated quotes raise :class:`MalformedCsv` with the physical
    row index; a file with zero data rows raises :class:`EmptyInput`.
    """
    _check_separator(separator)
    with open(path, "r", encoding=encoding, newline="") as f:
        text = f.read()
    return parse_csv_text(
        text,
        separator=separator,
        has_header=has_header,
        null_mode=null_mode,
        name=name or _stem(path),
    )


def parse_csv_text(
    text: str,
    *,
    separator: str = ",",
    has_header: bool = True,
    null_mode: NullMode = NullMode.NULL_EQUAL,
    name: str = "table",
) -> Table:
    """Like :func:`parse_csv` but over an in-memory string."""
    _check_separator(separator)
    raw_rows = _split_csv(text, separator)
    if not raw_rows:
        raise EmptyInput("no rows in input")
    width = len(raw_rows[0])
    for idx, fields in enumerate(raw_rows):
        if len(fields) != width:
            raise MalformedCsv(idx, f"expected {width} fields, got {len(fields)}")
    if has_header:
        header = [v for v, _ in raw_rows[0]]
        data = raw_rows[1:]
    else:
        header = [f"col_{i}" for i in range(width)]
        data = raw_rows
    if not data:
        raise EmptyInput("no data rows in input")
    cells = [[_field_value(v, q) for v, q in row] for row in data]
    return Table.from_rows(
        name,
        header,
        cells,
        has_header=has_header,
        separator=separator,
        null_mode=null_mode,
    )


def parse_csv_rows(text: str, separator: str = ",") -> list[list[Optional[str]]]:
    """Split CSV text into rows of nullable cells without a width check.

    Used for inherently ragged inputs such as transaction lists; quoting
    rules match :func:`parse_csv_text`.
    """
    _check_separator(separator)
    return [[_field_value(v, q) for v, q in row] for row in _split_csv(text, separator)]


def _field_value(value: str, quoted: bool) -> Optional[str]:
    if value == "" and not quoted:
        return None
    return value


def _stem(path: str) -> str:
    base = path.replace("\\", "/").rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0] if "." in base else base


def serialize_csv(table: Table) -> str:
    """Render a table back to RFC 4180 text with its configured separator.

    Null cells become empty fields; empty text values are quoted so the
    parse -> serialize -> parse round trip preserves cell values.
    """
    sep = table.separator
    lines = []
    if table.has_header:
        lines.append(sep.join(_escape_field(n, sep) for n in table.column_names))
    for r in range(table.row_count):
        lines.append(
            sep.join(_escape_field(table.cell(r, c), sep) for c in range(len(table.columns)))
        )
    return "\n".join(lines) + "\n"


def _escape_field(value: Optional[str], sep: str) -> str:
    if value is None:
        return ""
    if value == "":
        return '""'
    if sep in value or '"' in value or "\n" in value or "\r" in value:
        return '"' + value.replace('"', '""') + '"'
    return value


def build_pli(table: Table, column_index: int) -> StrippedPartition:
    """Stripped partition of one column: rows grouped by dictionary code.

    Under null-distinct mode null rows are singletons by definition and
    never enter a cluster.
    """
    if not 0 <= column_index < len(table.columns):
        raise IndexOutOfRange(f"column index {column_index} out of range")
    groups: dict[int, list[int]] = {}
    for row, code in enumerate(table.columns[column_index].codes):
        if code == NULL_CODE:
            continue
        groups.setdefault(code, []).append(row)
    return StrippedPartition.from_clusters(
        (g for g in groups.values() if len(g) >= 2),
        {column_index},
        table.row_count,
    )


def intersect_pli(p1: StrippedPartition, p2: StrippedPartition) -> StrippedPartition:
    """Product partition: equality on the union of both column sets.

    Standard probe-table refinement; the result equals grouping rows by
    the combined value tuple with singletons stripped, and is commutative
    up to cluster ordering.
    """
    if p1.source_row_count != p2.source_row_count:
        raise SourceMismatch(
            f"row counts differ: {p1.source_row_count} vs {p2.source_row_count}"
        )
    probe = [-1] * p1.source_row_count
    for ci, cluster in enumerate(p1.clusters):
        for row in cluster:
            probe[row] = ci
    groups: dict[tuple[int, int], list[int]] = {}
    for cj, cluster in enumerate(p2.clusters):
        for row in cluster:
            ci = probe[row]
            if ci < 0:
                continue
            groups.setdefault((ci, cj), []).append(row)
    return StrippedPartition.from_clusters(
        (g for g in groups.values() if len(g) >= 2),
        p1.over_columns | p2.over_columns,
        p1.source_row_count,
    )


def build_pli_for_set(table: Table, columns: Sequence[int]) -> StrippedPartition:
    """Stripped partition over a column set via chained refinement."""
    cols = sorted(set(columns))
    if not cols:
        rows = range(table.row_count)
        return StrippedPartition.from_clusters(
            [tuple(rows)] if table.row_count >= 2 else [],
            set(),
            table.row_count,
        )
    part = build_pli(table, cols[0])
    for c in cols[1:]:
        part = intersect_pli(part, build_pli(table, c))
    return part
