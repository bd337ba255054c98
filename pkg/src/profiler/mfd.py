"""Metric functional dependency validation.

A metric dependency relaxes value equality on the right-hand side: rows
sharing a left-hand side must have rhs values within distance delta of
each other.  "Holds" uses pairwise (diameter) semantics: every pair in
every lhs cluster must be within delta.  A point is flagged an outlier
when even its nearest neighbour in the cluster is farther than delta,
which is exactly the mark rendered as ``x`` on the console screen.

Three metrics cover the usual rhs shapes: absolute difference for one
numeric column, Euclidean distance for a numeric column tuple, and
Levenshtein distance for one text column.

Null cells compare as distance 0 to other nulls under null-equal mode
and as infinitely far under null-distinct mode; a null is always
infinitely far from a non-null value.  This keeps delta=0 validation in
exact agreement with exact FD validation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .control import RunControl
from .dataset import ColumnType, NullMode, Table
from .errors import IndexOutOfRange, TypeMismatch, ValidationError
from .fd import _partition_clusters

_NUMERIC = (ColumnType.INTEGER, ColumnType.REAL)


class MfdMetric(str, enum.Enum):
    ABSOLUTE = "absolute-difference"
    EUCLIDEAN = "euclidean"
    LEVENSHTEIN = "levenshtein"


@dataclass(frozen=True)
class MfdQuery:
    lhs: tuple[int, ...]
    rhs: tuple[int, ...]
    metric: MfdMetric
    delta: float


@dataclass(frozen=True)
class MfdPoint:
    row_index: int
    values: tuple[Optional[str], ...]
    is_outlier: bool
    max_min_distance: float
    """Distance to the nearest other point of the cluster (the outlier
    criterion); infinite when no comparable point exists."""


@dataclass(frozen=True)
class MfdCluster:
    lhs_value: tuple[Optional[str], ...]
    points: tuple[MfdPoint, ...]

    @property
    def outlier_count(self) -> int:
        return sum(1 for p in self.points if p.is_outlier)

    @property
    def max_distance(self) -> float:
        return max((p.max_min_distance for p in self.points), default=0.0)


@dataclass(frozen=True)
class MfdValidationResult:
    holds: bool
    clusters: tuple[MfdCluster, ...]


def _check_query(table: Table, query: MfdQuery) -> None:
    if query.delta < 0:
        raise ValidationError("delta must be >= 0")
    for c in query.lhs + query.rhs:
        if not 0 <= c < len(table.columns):
            raise IndexOutOfRange(f"column index {c} out of range")
    if set(query.lhs) & set(query.rhs):
        raise ValidationError("lhs and rhs columns must be disjoint")
    types = [table.columns[c].inferred_type for c in query.rhs]
    if query.metric is MfdMetric.ABSOLUTE:
        if len(query.rhs) != 1 or types[0] not in _NUMERIC:
            raise TypeMismatch("absolute-difference needs exactly one numeric rhs column")
    elif query.metric is MfdMetric.EUCLIDEAN:
        if not query.rhs or any(t not in _NUMERIC for t in types):
            raise TypeMismatch("euclidean needs one or more numeric rhs columns")
    elif query.metric is MfdMetric.LEVENSHTEIN:
        if len(query.rhs) != 1 or types[0] is not ColumnType.TEXT:
            raise TypeMismatch("levenshtein needs exactly one text rhs column")


def levenshtein(a: str, b: str) -> int:
    """Classic two-row dynamic program; O(len(a) * len(b))."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _numeric_point(table: Table, row: int, rhs: tuple[int, ...]) -> Optional[tuple[float, ...]]:
    vals = []
    for c in rhs:
        raw = table.columns[c].decode(row)
        if raw is None:
            return None
        vals.append(float(raw))
    return tuple(vals)


def validate_mfd(
    table: Table,
    query: MfdQuery,
    *,
    control: Optional[RunControl] = None,
) -> MfdValidationResult:
    """Check the metric dependency and return exactly the violating clusters."""
    _check_query(table, query)
    null_equal = table.null_mode is NullMode.NULL_EQUAL

    if query.metric is MfdMetric.LEVENSHTEIN:
        rhs_col = query.rhs[0]

        def point_of(row: int):
            return table.columns[rhs_col].decode(row)

        def dist(a, b) -> float:
            if a is None or b is None:
                if a is None and b is None:
                    return 0.0 if null_equal else math.inf
                return math.inf
            return float(levenshtein(a, b))

    else:

        def point_of(row: int):
            return _numeric_point(table, row, query.rhs)

        def dist(a, b) -> float:
            if a is None or b is None:
                if a is None and b is None:
                    return 0.0 if null_equal else math.inf
                return math.inf
            return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))

    violating = []
    for cluster in _partition_clusters(table, tuple(sorted(set(query.lhs)))):
        if control is not None:
            control.checkpoint()
        values = [point_of(row) for row in cluster]
        size = len(cluster)
        # Pairwise distances; clusters are desk-scale (singletons already stripped).
        nearest = [math.inf] * size
        diameter = 0.0
        for i in range(size):
            for j in range(i + 1, size):
                d = dist(values[i], values[j])
                if d < nearest[i]:
                    nearest[i] = d
                if d < nearest[j]:
                    nearest[j] = d
                if d > diameter:
                    diameter = d
        if diameter <= query.delta:
            continue
        first = cluster[0]
        points = tuple(
            MfdPoint(
                row_index=row,
                values=tuple(table.columns[c].decode(row) for c in query.rhs),
                is_outlier=nearest[i] > query.delta,
                max_min_distance=nearest[i],
            )
            for i, row in enumerate(cluster)
        )
        violating.append(
            MfdCluster(
                lhs_value=tuple(table.columns[c].decode(first) for c in sorted(set(query.lhs))),
                points=points,
            )
        )
    return MfdValidationResult(holds=not violating, clusters=tuple(violating))


def sort_clusters(
    clusters: Sequence[MfdCluster], key: str = "index"
) -> list[MfdCluster]:
    """Order clusters for display: by index, outlier count or distance."""
    if key == "index":
        return sorted(clusters, key=lambda cl: cl.points[0].row_index)
    if key == "outliers":
        return sorted(clusters, key=lambda cl: (-cl.outlier_count, cl.points[0].row_index))
    if key == "distance":
        return sorted(clusters, key=lambda cl: (-cl.max_distance, cl.points[0].row_index))
    raise ValidationError(f"unknown cluster sort key {key!r}")


def sort_points(points: Sequence[MfdPoint], key: str = "index") -> list[MfdPoint]:
    """Order points within a cluster for display."""
    if key == "index":
        return sorted(points, key=lambda p: p.row_index)
    if key == "distance":
        return sorted(points, key=lambda p: (-p.max_min_distance, p.row_index))
    if key == "outliers":
        return sorted(points, key=lambda p: (not p.is_outlier, p.row_index))
    raise ValidationError(f"unknown point sort key {key!r}")
