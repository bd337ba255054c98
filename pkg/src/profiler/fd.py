"""Exact and approximate functional dependency discovery and validation.

The search is a level-wise lattice walk over left-hand-side column sets,
one lattice per right-hand side, with apriori-style pruning: a candidate
lhs is expanded only while every proper subset failed the threshold, so
the output is exactly the set of minimal dependencies.  Partitions are
shared across right-hand sides and refined level by level.

The error measure is g3: the minimum fraction of rows whose removal
makes the dependency exact.  From a stripped lhs partition it equals
``sum over clusters of (cluster size - majority rhs count) / row_count``;
rows outside any cluster have a unique lhs and never violate.

Holds/fails decisions are made in exact rational arithmetic
(``violations <= threshold * row_count`` evaluated over integers), so a
threshold like 0.25 on a 4-row table behaves exactly; the ``error``
stored on results is the float ``violations / row_count``.

Empty left-hand sides (near-constant columns) are evaluated at level 0
and reported like any dependency, but they never shadow single-column
dependencies: minimality is judged against non-empty generalizations.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .control import RunControl
from .dataset import NULL_CODE, StrippedPartition, Table
from .errors import EmptyInput, IndexOutOfRange, ValidationError

# Rough per-row cost of a cached partition entry, used for best-effort
# memory accounting against a RunControl budget.
_BYTES_PER_PARTITION_ROW = 64


@dataclass(frozen=True)
class Fd:
    """A functional dependency lhs -> rhs with its g3 error."""

    lhs: tuple[int, ...]
    rhs: int
    error: float

    def __post_init__(self):
        if self.rhs in self.lhs:
            raise ValidationError("rhs column must not appear in lhs")
        if tuple(sorted(set(self.lhs))) != self.lhs:
            object.__setattr__(self, "lhs", tuple(sorted(set(self.lhs))))

    @property
    def sort_key(self) -> tuple:
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class FdDiscoveryConfig:
    max_lhs: int = 4
    error_threshold: float = 0.0
    thread_count: int = 1

    def validate(self) -> None:
        if self.max_lhs < 1:
            raise ValidationError("max_lhs must be >= 1")
        if not 0.0 <= self.error_threshold < 1.0:
            raise ValidationError("error_threshold must lie in [0, 1)")
        if self.thread_count < 1:
            raise ValidationError("thread_count must be >= 1")


@dataclass(frozen=True)
class ViolationCluster:
    """Rows agreeing on the lhs but disagreeing on the rhs."""

    lhs_value: tuple[Optional[str], ...]
    rows: tuple[tuple[int, Optional[str]], ...]
    distinct_rhs_count: int
    majority_rhs: Optional[str]
    majority_count: int

    @property
    def size(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class FdValidationReport:
    holds: bool
    error: float
    clusters: tuple[ViolationCluster, ...]
    violation_count: int = 0


def max_violations(threshold: "float | Fraction", row_count: int) -> int:
    """Largest violation count v with v / row_count <= threshold, exactly.

    Thresholds are interpreted at their exact rational value, so callers
    needing a boundary like one third can pass ``Fraction(1, 3)`` instead
    of the slightly smaller float ``1 / 3``.
    """
    return math.floor(Fraction(threshold) * row_count)


def _cluster_violations(cluster: Sequence[int], rhs_codes: Sequence[int]) -> int:
    """Rows to drop from one lhs cluster so all remaining rhs codes agree.

    NULL_CODE rows are pairwise-distinct (null-distinct mode), so each
    can only ever be a majority of one.
    """
    counts: dict[int, int] = {}
    nulls = 0
    for row in cluster:
        code = rhs_codes[row]
        if code == NULL_CODE:
            nulls += 1
        else:
            counts[code] = counts.get(code, 0) + 1
    best = max(counts.values(), default=0)
    if nulls and best == 0:
        best = 1
    return len(cluster) - best


def fd_violations(
    table: Table,
    lhs: Sequence[int],
    rhs: int,
    *,
    partition: Optional[StrippedPartition] = None,
) -> int:
    """Exact number of rows to remove so that lhs -> rhs holds."""
    lhs = tuple(sorted(set(lhs)))
    if not 0 <= rhs < len(table.columns):
        raise IndexOutOfRange(f"rhs column index {rhs} out of range")
    for c in lhs:
        if not 0 <= c < len(table.columns):
            raise IndexOutOfRange(f"lhs column index {c} out of range")
    if rhs in lhs:
        raise ValidationError("rhs column must not appear in lhs")
    rhs_codes = table.columns[rhs].codes
    if partition is None:
        clusters = _partition_clusters(table, lhs)
    else:
        clusters = [list(c) for c in partition.clusters]
    return sum(_cluster_violations(c, rhs_codes) for c in clusters)


def fd_error(table: Table, lhs: Sequence[int], rhs: int) -> float:
    """g3 error of lhs -> rhs: minimal fraction of rows to remove.

    A table with fewer than two rows has no violating pair, so the error
    is 0 for any dependency.
    """
    if table.row_count == 0:
        return 0.0
    return fd_violations(table, lhs, rhs) / table.row_count


def _partition_clusters(table: Table, lhs: tuple[int, ...]) -> list[list[int]]:
    """Clusters (size >= 2) of the stripped partition over ``lhs``."""
    n = table.row_count
    if not lhs:
        return [list(range(n))] if n >= 2 else []
    clusters = _column_clusters(table, lhs[0])
    for col in lhs[1:]:
        clusters = _refine(clusters, table.columns[col].codes)
    return clusters


def _column_clusters(table: Table, col: int) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for row, code in enumerate(table.columns[col].codes):
        if code == NULL_CODE:
            continue
        groups.setdefault(code, []).append(row)
    return [g for g in groups.values() if len(g) >= 2]


def _refine(clusters: list[list[int]], codes: Sequence[int]) -> list[list[int]]:
    """Refine a partition by one more column's codes; strip singletons."""
    out: list[list[int]] = []
    for cluster in clusters:
        sub: dict[int, list[int]] = {}
        for row in cluster:
            code = codes[row]
            if code == NULL_CODE:
                continue
            sub.setdefault(code, []).append(row)
        for g in sub.values():
            if len(g) >= 2:
                out.append(g)
    return out


def validate_fd(
    table: Table,
    lhs: Sequence[int],
    rhs: int,
    threshold: "float | Fraction" = 0.0,
    *,
    control: Optional[RunControl] = None,
) -> FdValidationReport:
    """Check one dependency and explain every violating row group.

    Clusters enumerate each lhs-equal row group holding at least two
    distinct rhs values, sorted by descending size then by lhs value
    order; ties on the majority value break toward the smallest
    dictionary code.
    """
    lhs = tuple(sorted(set(lhs)))
    if not 0.0 <= threshold < 1.0:
        raise ValidationError("threshold must lie in [0, 1)")
    violations = fd_violations(table, lhs, rhs)
    n = table.row_count
    error = violations / n if n else 0.0
    holds = violations <= max_violations(threshold, n) if n else True

    rhs_col = table.columns[rhs]
    clusters = []
    for cluster in _partition_clusters(table, lhs):
        if control is not None:
            control.checkpoint()
        counts: dict[int, int] = {}
        null_rows = []
        for row in cluster:
            code = rhs_col.codes[row]
            if code == NULL_CODE:
                null_rows.append(row)
            else:
                counts[code] = counts.get(code, 0) + 1
        distinct = len(counts) + len(null_rows)
        if distinct < 2:
            continue
        if counts:
            # Highest count wins; ties break toward the smaller code.
            majority_code = min(counts, key=lambda c: (-counts[c], c))
            majority_value = rhs_col.dictionary[majority_code]
            majority_count = counts[majority_code]
        else:
            majority_value = None
            majority_count = 1
        first = cluster[0]
        clusters.append(
            ViolationCluster(
                lhs_value=tuple(table.columns[c].decode(first) for c in lhs),
                rows=tuple((row, rhs_col.decode(row)) for row in cluster),
                distinct_rhs_count=distinct,
                majority_rhs=majority_value,
                majority_count=majority_count,
            )
        )
    def lhs_order(cl: ViolationCluster) -> tuple[int, ...]:
        first_row = cl.rows[0][0]
        return tuple(table.columns[c].codes[first_row] for c in lhs)

    clusters.sort(key=lambda cl: (-len(cl.rows), lhs_order(cl)))
    return FdValidationReport(
        holds=holds,
        error=error,
        clusters=tuple(clusters),
        violation_count=violations,
    )


def discover_fds(
    table: Table,
    config: FdDiscoveryConfig,
    *,
    control: Optional[RunControl] = None,
) -> list[Fd]:
    """All minimal dependencies with g3 error within the threshold.

    Results are ordered lexicographically by lhs then rhs and are
    identical for any thread_count; workers split by right-hand side
    within a level and merge deterministically.
    """
    config.validate()
    if table.row_count == 0:
        raise EmptyInput("table has no rows")
    m = len(table.columns)
    if m < 2:
        # No lhs/rhs column pair exists on a single-column table.
        return []
    n = table.row_count
    limit = max_violations(config.error_threshold, n)
    rhs_codes = [col.codes for col in table.columns]

    results: list[Fd] = []

    # Level 0: empty-lhs (near-constant column) findings.
    base_cluster = list(range(n))
    for rhs in range(m):
        v = _cluster_violations(base_cluster, rhs_codes[rhs]) if n >= 2 else 0
        if v <= limit:
            results.append(Fd((), rhs, v / n))

    # Non-empty levels: open (failed) lhs candidates per rhs.
    open_by_rhs: dict[int, set[tuple[int, ...]]] = {rhs: {()} for rhs in range(m)}
    partitions: dict[tuple[int, ...], list[list[int]]] = {}

    pool = (
        ThreadPoolExecutor(max_workers=config.thread_count)
        if config.thread_count > 1
        else None
    )
    try:
        for level in range(1, config.max_lhs + 1):
            candidates = _generate_candidates(open_by_rhs, m, level)
            if not any(candidates.values()):
                break
            needed = sorted({x for xs in candidates.values() for x in xs})
            partitions = _build_partitions(
                table, needed, partitions, level, control
            )

            def check_rhs(rhs: int) -> tuple[list[Fd], set[tuple[int, ...]]]:
                found: list[Fd] = []
                failed: set[tuple[int, ...]] = set()
                codes = rhs_codes[rhs]
                for lhs in candidates[rhs]:
                    if control is not None:
                        control.checkpoint()
                    v = _bounded_violations(partitions[lhs], codes, limit)
                    if v <= limit:
                        found.append(Fd(lhs, rhs, v / n))
                    else:
                        failed.add(lhs)
                return found, failed

            rhs_list = [rhs for rhs in range(m) if candidates[rhs]]
            if pool is not None:
                outcomes = list(pool.map(check_rhs, rhs_list))
            else:
                outcomes = [check_rhs(rhs) for rhs in rhs_list]

            open_by_rhs = {}
            for rhs, (found, failed) in zip(rhs_list, outcomes):
                results.extend(found)
                if failed:
                    open_by_rhs[rhs] = failed
            if control is not None:
                control.report_progress(level / (config.max_lhs + 1))
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    if control is not None:
        control.report_progress(1.0)
    results.sort(key=lambda fd: fd.sort_key)
    return results


def _generate_candidates(
    open_by_rhs: dict[int, set[tuple[int, ...]]], m: int, level: int
) -> dict[int, list[tuple[int, ...]]]:
    """Apriori step: extend failed lhs sets whose every subset failed."""
    out: dict[int, list[tuple[int, ...]]] = {rhs: [] for rhs in range(m)}
    for rhs, failed in open_by_rhs.items():
        if level == 1:
            out[rhs] = [(c,) for c in range(m) if c != rhs]
            continue
        seen: set[tuple[int, ...]] = set()
        for lhs in failed:
            for c in range(m):
                if c == rhs or c in lhs:
                    continue
                cand = tuple(sorted(lhs + (c,)))
                if cand in seen:
                    continue
                seen.add(cand)
                if all(
                    cand[:i] + cand[i + 1 :] in failed for i in range(len(cand))
                ):
                    out[rhs].append(cand)
        out[rhs].sort()
    return out


def _build_partitions(
    table: Table,
    needed: list[tuple[int, ...]],
    previous: dict[tuple[int, ...], list[list[int]]],
    level: int,
    control: Optional[RunControl],
) -> dict[tuple[int, ...], list[list[int]]]:
    """Partitions for this level's lhs sets, refined from the last level."""
    out: dict[tuple[int, ...], list[list[int]]] = {}
    total_rows = 0
    for lhs in needed:
        if control is not None:
            control.checkpoint()
        if level == 1:
            part = _column_clusters(table, lhs[0])
        else:
            parent = previous[lhs[:-1]]
            part = _refine(parent, table.columns[lhs[-1]].codes)
        out[lhs] = part
        total_rows += sum(len(c) for c in part)
        if control is not None:
            control.account_memory(total_rows * _BYTES_PER_PARTITION_ROW)
    return out


def _bounded_violations(
    clusters: list[list[int]], rhs_codes: Sequence[int], limit: int
) -> int:
    """Violation count with early exit once the threshold is exceeded."""
    total = 0
    for cluster in clusters:
        total += _cluster_violations(cluster, rhs_codes)
        if total > limit:
            return total
    return total


def brute_force_pli(table: Table, columns: Sequence[int]) -> StrippedPartition:
    """Direct grouping of rows by their value tuple (test oracle support)."""
    cols = tuple(sorted(set(columns)))
    groups: dict[tuple[int, ...], list[int]] = {}
    for row in range(table.row_count):
        key = []
        skip = False
        for c in cols:
            code = table.columns[c].codes[row]
            if code == NULL_CODE:
                skip = True
                break
            key.append(code)
        if skip:
            continue
        groups.setdefault(tuple(key), []).append(row)
    return StrippedPartition.from_clusters(
        (g for g in groups.values() if len(g) >= 2), cols, table.row_count
    )
