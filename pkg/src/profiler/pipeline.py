"""Human-in-the-loop typo detection.

The pipeline surfaces dependencies that almost hold (0 < g3 error <=
threshold), presents their violation clusters, and lets the caller apply
per-cell fix decisions that produce a new immutable table revision.
Suspicion scoring is frequency based: the minority share of a cluster.
The pipeline never repairs anything on its own; a human decides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .control import RunControl
from .dataset import Table
from .errors import IndexOutOfRange, ValidationError
from .fd import (
    Fd,
    FdDiscoveryConfig,
    ViolationCluster,
    discover_fds,
    validate_fd,
)


@dataclass(frozen=True)
class TypoPipelineConfig:
    error_threshold: float = 0.05
    max_lhs: int = 3
    min_cluster_size: int = 2
    max_clusters_shown: int = 50
    thread_count: int = 1

    def validate(self) -> None:
        if not 0.0 < self.error_threshold < 1.0:
            raise ValidationError("error_threshold must lie in (0, 1)")
        if self.max_lhs < 1:
            raise ValidationError("max_lhs must be >= 1")
        if self.min_cluster_size < 2:
            raise ValidationError("min_cluster_size must be >= 2")
        if self.max_clusters_shown < 1:
            raise ValidationError("max_clusters_shown must be >= 1")


@dataclass(frozen=True)
class TypoCandidateCluster:
    fd: Fd
    cluster: ViolationCluster
    suspect_rows: tuple[tuple[int, Optional[str]], ...]
    suspicion_score: float
    """Minority share of the cluster: (size - majority count) / size."""


@dataclass(frozen=True)
class FixDecision:
    row_index: int
    column_index: int
    replacement: Optional[str] = None
    keep: bool = False


def find_typo_candidates(
    table: Table,
    config: TypoPipelineConfig,
    *,
    control: Optional[RunControl] = None,
) -> list[tuple[Fd, list[TypoCandidateCluster]]]:
    """Almost-holding dependencies with their suspicious clusters.

    Exact dependencies are excluded by definition.  Within one
    dependency, clusters below min_cluster_size are dropped and the rest
    truncated to max_clusters_shown; dependencies are ranked by ascending
    error, then descending largest-cluster size, then lhs/rhs order.
    """
    config.validate()
    discovery = FdDiscoveryConfig(
        max_lhs=config.max_lhs,
        error_threshold=config.error_threshold,
        thread_count=config.thread_count,
    )
    results = []
    for fd in discover_fds(table, discovery, control=control):
        if fd.error <= 0.0:
            continue
        report = validate_fd(table, fd.lhs, fd.rhs, control=control)
        clusters = []
        for cluster in report.clusters:
            if cluster.size < config.min_cluster_size:
                continue
            suspects = tuple(
                (row, value) for row, value in cluster.rows if value != cluster.majority_rhs
            )
            if not suspects:
                # All-null cluster under null-distinct mode: nothing actionable.
                continue
            clusters.append(
                TypoCandidateCluster(
                    fd=fd,
                    cluster=cluster,
                    suspect_rows=suspects,
                    suspicion_score=(cluster.size - cluster.majority_count) / cluster.size,
                )
            )
        clusters = clusters[: config.max_clusters_shown]
        if clusters:
            results.append((fd, clusters))
    results.sort(key=lambda pair: (pair[0].error, -pair[1][0].cluster.size, pair[0].sort_key))
    return results


def apply_fixes(
    table: Table,
    decisions: Sequence[FixDecision],
    *,
    name: Optional[str] = None,
) -> Table:
    """Produce a new table revision with the decided cell replacements.

    The input table is untouched; row and column counts never change.
    Decisions marked ``keep`` are recorded no-ops.
    """
    width = len(table.columns)
    for d in decisions:
        if not 0 <= d.row_index < table.row_count:
            raise IndexOutOfRange(f"row index {d.row_index} out of range")
        if not 0 <= d.column_index < width:
            raise IndexOutOfRange(f"column index {d.column_index} out of range")
    rows = [list(table.row(r)) for r in range(table.row_count)]
    for d in decisions:
        if d.keep:
            continue
        rows[d.row_index][d.column_index] = d.replacement
    return Table.from_rows(
        name or table.name,
        list(table.column_names),
        rows,
        has_header=table.has_header,
        separator=table.separator,
        null_mode=table.null_mode,
    )


def majority_fixes(clusters: Sequence[TypoCandidateCluster]) -> list[FixDecision]:
    """Decisions replacing every suspect value with its cluster majority."""
    out = []
    for tc in clusters:
        for row, _ in tc.suspect_rows:
            out.append(
                FixDecision(
                    row_index=row,
                    column_index=tc.fd.rhs,
                    replacement=tc.cluster.majority_rhs,
                )
            )
    return out
