"""Naive per-column profiling: counts, extrema and simple moments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .dataset import ColumnType, Table
from .errors import EmptyInput

Numeric = Union[int, float]


@dataclass(frozen=True)
class ColumnStats:
    name: str
    inferred_type: ColumnType
    row_count: int
    null_count: int
    distinct_count: int
    min: Optional[Union[Numeric, str]]
    max: Optional[Union[Numeric, str]]
    mean: Optional[float]
    std_dev: Optional[float]
    """Population standard deviation; None for non-numeric columns."""


def profile_table(table: Table) -> list[ColumnStats]:
    """One ColumnStats per column.

    Numeric columns get min/max in numeric order plus mean and population
    standard deviation; text columns get lexicographic min/max; all-null
    columns report no extrema.
    """
    if table.row_count == 0:
        raise EmptyInput("cannot profile an empty table")
    out = []
    for col in table.columns:
        null_count = len(col.null_positions)
        values = [v for v in col.dictionary if v is not None]
        distinct = len(values)
        counts: dict[int, int] = {}
        for row, code in enumerate(col.codes):
            if row in col.null_positions:
                continue
            counts[code] = counts.get(code, 0) + 1
        if col.inferred_type in (ColumnType.INTEGER, ColumnType.REAL) and values:
            cast = int if col.inferred_type is ColumnType.INTEGER else float
            numeric = {code: cast(col.dictionary[code]) for code in counts}
            # Accumulate in value order so results are exactly permutation
            # invariant despite float addition being non-associative.
            ordered = sorted(counts.items(), key=lambda ck: numeric[ck[0]])
            n = sum(counts.values())
            mean = sum(float(numeric[c]) * k for c, k in ordered) / n
            variance = sum((float(numeric[c]) - mean) ** 2 * k for c, k in ordered) / n
            stats = ColumnStats(
                name=col.name,
                inferred_type=col.inferred_type,
                row_count=table.row_count,
                null_count=null_count,
                distinct_count=distinct,
                min=min(numeric.values()),
                max=max(numeric.values()),
                mean=mean,
                std_dev=math.sqrt(variance),
            )
        elif col.inferred_type is ColumnType.EMPTY or not values:
            stats = ColumnStats(
                name=col.name,
                inferred_type=col.inferred_type,
                row_count=table.row_count,
                null_count=null_count,
                distinct_count=0,
                min=None,
                max=None,
                mean=None,
                std_dev=None,
            )
        else:
            stats = ColumnStats(
                name=col.name,
                inferred_type=col.inferred_type,
                row_count=table.row_count,
                null_count=null_count,
                distinct_count=distinct,
                min=min(values),
                max=max(values),
                mean=None,
                std_dev=None,
            )
        out.append(stats)
    return out
