"""Task result items: text rendering, JSON payloads, sort/filter/page.

This module fixes the external field names.  Text forms:

* fd:        ``[A, B] -> C (error=0.25)``
* ind:       ``orders.customer_id ⊆ customers.id``
* itemset:   ``{bread, milk} (support=0.6)``
* rule:      ``{diaper} -> {beer} (sup=0.6, conf=0.75)``
* stats:     one line per column
* cluster screens: one item per violating cluster

JSON payloads mirror these with stable keys (``lhs``, ``rhs``, ``error``,
``dependent``, ``referenced``, ``items``, ``support``, ``antecedent``,
``consequent``, ``confidence``, ...).  Regex filters apply to the text
rendering; sort keys are per-kind and listed in ``sort_values``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from ..arm import ItemsetResult, Rule, TransactionSet
from ..dataset import Table
from ..errors import BadRegex, ValidationError
from ..fd import Fd, FdValidationReport, ViolationCluster
from ..ind import Ind
from ..mfd import MfdCluster, MfdValidationResult
from ..pipeline import TypoCandidateCluster
from ..stats import ColumnStats


@dataclass(frozen=True)
class ResultItem:
    text: str
    payload: dict
    sort_values: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class TaskResult:
    kind: str
    items: tuple[ResultItem, ...]
    summary: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ResultPage:
    total_count: int
    items: list[dict]
    sort_key: Optional[str]
    regex_filter: Optional[str]
    page: int
    page_size: int

    def to_json(self) -> dict:
        return {
            "total_count": self.total_count,
            "items": self.items,
            "sort": self.sort_key,
            "filter": self.regex_filter,
            "page": self.page,
            "page_size": self.page_size,
        }


def _fmt(x: float) -> str:
    return format(x, ".6g")


# -- builders ------------------------------------------------------------


def fd_text(table: Table, fd: Fd) -> str:
    lhs = ", ".join(table.columns[c].name for c in fd.lhs)
    return f"[{lhs}] -> {table.columns[fd.rhs].name} (error={_fmt(fd.error)})"


def fd_items(table: Table, fds: Sequence[Fd]) -> list[ResultItem]:
    out = []
    for fd in fds:
        names = [table.columns[c].name for c in fd.lhs]
        out.append(
            ResultItem(
                text=fd_text(table, fd),
                payload={
                    "lhs": names,
                    "rhs": table.columns[fd.rhs].name,
                    "lhs_indexes": list(fd.lhs),
                    "rhs_index": fd.rhs,
                    "error": fd.error,
                },
                sort_values={
                    "error": fd.error,
                    "lhs": tuple(fd.lhs),
                    "rhs": fd.rhs,
                    "lhs_size": len(fd.lhs),
                },
            )
        )
    return out


def violation_cluster_items(clusters: Sequence[ViolationCluster]) -> list[ResultItem]:
    out = []
    for cl in clusters:
        lhs_text = ", ".join("∅" if v is None else v for v in cl.lhs_value)
        text = (
            f"lhs=({lhs_text}) size={cl.size} distinct_rhs={cl.distinct_rhs_count} "
            f"majority={cl.majority_rhs!r}"
        )
        out.append(
            ResultItem(
                text=text,
                payload={
                    "lhs_value": list(cl.lhs_value),
                    "rows": [{"row": r, "value": v} for r, v in cl.rows],
                    "distinct_rhs_count": cl.distinct_rhs_count,
                    "majority_rhs": cl.majority_rhs,
                    "majority_count": cl.majority_count,
                },
                sort_values={"size": cl.size, "distinct": cl.distinct_rhs_count},
            )
        )
    return out


def ind_items(inds: Sequence[Ind]) -> list[ResultItem]:
    return [
        ResultItem(
            text=ind.render(),
            payload={
                "dependent": {
                    "table": ind.dependent.table,
                    "column_index": ind.dependent.column_index,
                    "column": ind.dependent.column_name,
                },
                "referenced": {
                    "table": ind.referenced.table,
                    "column_index": ind.referenced.column_index,
                    "column": ind.referenced.column_name,
                },
            },
            sort_values={
                "dependent": (ind.dependent.table, ind.dependent.column_index),
                "referenced": (ind.referenced.table, ind.referenced.column_index),
            },
        )
        for ind in inds
    ]


def itemset_items(txns: TransactionSet, results: Sequence[ItemsetResult]) -> list[ResultItem]:
    out = []
    for r in results:
        names = [txns.item_names[i] for i in r.items]
        out.append(
            ResultItem(
                text=f"{{{', '.join(names)}}} (support={_fmt(r.support)})",
                payload={"type": "itemset", "items": names, "support": r.support},
                sort_values={"support": r.support, "size": len(r.items)},
            )
        )
    return out


def rule_items(txns: TransactionSet, rules: Sequence[Rule]) -> list[ResultItem]:
    out = []
    for r in rules:
        ante = [txns.item_names[i] for i in r.antecedent]
        cons = [txns.item_names[i] for i in r.consequent]
        out.append(
            ResultItem(
                text=(
                    f"{{{', '.join(ante)}}} -> {{{', '.join(cons)}}} "
                    f"(sup={_fmt(r.support)}, conf={_fmt(r.confidence)})"
                ),
                payload={
                    "type": "rule",
                    "antecedent": ante,
                    "consequent": cons,
                    "support": r.support,
                    "confidence": r.confidence,
                },
                sort_values={
                    "support": r.support,
                    "confidence": r.confidence,
                    "size": len(r.antecedent) + len(r.consequent),
                },
            )
        )
    return out


def stats_items(stats: Sequence[ColumnStats]) -> list[ResultItem]:
    out = []
    for s in stats:
        parts = [
            f"{s.name}: type={s.inferred_type.value}",
            f"rows={s.row_count}",
            f"nulls={s.null_count}",
            f"distinct={s.distinct_count}",
        ]
        if s.min is not None:
            parts.append(f"min={s.min}")
            parts.append(f"max={s.max}")
        if s.mean is not None:
            parts.append(f"mean={_fmt(s.mean)}")
            parts.append(f"std_dev={_fmt(s.std_dev)}")
        out.append(
            ResultItem(
                text=" ".join(parts),
                payload={
                    "name": s.name,
                    "inferred_type": s.inferred_type.value,
                    "row_count": s.row_count,
                    "null_count": s.null_count,
                    "distinct_count": s.distinct_count,
                    "min": s.min,
                    "max": s.max,
                    "mean": s.mean,
                    "std_dev": s.std_dev,
                },
                sort_values={
                    "name": s.name,
                    "nulls": s.null_count,
                    "distinct": s.distinct_count,
                },
            )
        )
    return out


def mfd_cluster_items(clusters: Sequence[MfdCluster]) -> list[ResultItem]:
    out = []
    for cl in clusters:
        lhs_text = ", ".join("∅" if v is None else v for v in cl.lhs_value)
        out.append(
            ResultItem(
                text=(
                    f"lhs=({lhs_text}) size={len(cl.points)} "
                    f"outliers={cl.outlier_count} max_distance={_fmt(cl.max_distance)}"
                ),
                payload={
                    "lhs_value": list(cl.lhs_value),
                    "points": [
                        {
                            "row": p.row_index,
                            "values": list(p.values),
                            "is_outlier": p.is_outlier,
                            "distance": None
                            if p.max_min_distance == float("inf")
                            else p.max_min_distance,
                        }
                        for p in cl.points
                    ],
                    "outlier_count": cl.outlier_count,
                },
                sort_values={
                    "size": len(cl.points),
                    "outliers": cl.outlier_count,
                    "distance": cl.max_distance,
                    "index": cl.points[0].row_index,
                },
            )
        )
    return out


def typo_items(
    table: Table, results: Sequence[tuple[Fd, Sequence[TypoCandidateCluster]]]
) -> list[ResultItem]:
    out = []
    for fd, clusters in results:
        for tc in clusters:
            cl = tc.cluster
            lhs_text = ", ".join("∅" if v is None else v for v in cl.lhs_value)
            out.append(
                ResultItem(
                    text=(
                        f"{fd_text(table, fd)} cluster lhs=({lhs_text}) "
                        f"size={cl.size} suspects={len(tc.suspect_rows)} "
                        f"score={_fmt(tc.suspicion_score)}"
                    ),
                    payload={
                        "fd": {
                            "lhs": [table.columns[c].name for c in fd.lhs],
                            "rhs": table.columns[fd.rhs].name,
                            "lhs_indexes": list(fd.lhs),
                            "rhs_index": fd.rhs,
                            "error": fd.error,
                        },
                        "cluster": {
                            "lhs_value": list(cl.lhs_value),
                            "rows": [{"row": r, "value": v} for r, v in cl.rows],
                            "majority_rhs": cl.majority_rhs,
                            "majority_count": cl.majority_count,
                        },
                        "suspect_rows": [
                            {"row": r, "value": v} for r, v in tc.suspect_rows
                        ],
                        "suspicion_score": tc.suspicion_score,
                    },
                    sort_values={
                        "error": fd.error,
                        "size": cl.size,
                        "score": tc.suspicion_score,
                    },
                )
            )
    return out


def fd_validation_result(table: Table, lhs, rhs, report: FdValidationReport) -> TaskResult:
    return TaskResult(
        kind="validate_fd",
        items=tuple(violation_cluster_items(report.clusters)),
        summary={
            "holds": report.holds,
            "error": report.error,
            "violation_count": report.violation_count,
            "lhs": [table.columns[c].name for c in lhs],
            "rhs": table.columns[rhs].name,
        },
    )


def mfd_validation_result(result: MfdValidationResult) -> TaskResult:
    return TaskResult(
        kind="validate_mfd",
        items=tuple(mfd_cluster_items(result.clusters)),
        summary={"holds": result.holds, "cluster_count": len(result.clusters)},
    )


# -- paging --------------------------------------------------------------


def paginate(
    result: TaskResult,
    *,
    sort: Optional[str] = None,
    regex_filter: Optional[str] = None,
    page: int = 0,
    page_size: int = 50,
) -> ResultPage:
    """Deterministic sorted/filtered pagination over result items.

    ``sort`` names a per-kind sort key, prefix ``-`` for descending; the
    regex applies to each item's text rendering.  An empty filter is the
    identity.  Pages beyond the range return no items but the true
    total_count.
    """
    if page < 0 or page_size < 1:
        raise ValidationError("page must be >= 0 and page_size >= 1")
    items = list(result.items)
    if regex_filter:
        try:
            pattern = re.compile(regex_filter)
        except re.error as e:
            raise BadRegex(f"invalid regular expression: {e}") from e
        items = [it for it in items if pattern.search(it.text)]
    if sort:
        descending = sort.startswith("-")
        key = sort[1:] if descending else sort
        if any(key not in it.sort_values for it in items):
            known = sorted({k for it in items for k in it.sort_values})
            raise ValidationError(f"unknown sort key {key!r}; known keys: {known}")
        items.sort(key=lambda it: it.sort_values[key], reverse=descending)
    start = page * page_size
    window = items[start : start + page_size]
    return ResultPage(
        total_count=len(items),
        items=[{"text": it.text, **it.payload} for it in window],
        sort_key=sort,
        regex_filter=regex_filter,
        page=page,
        page_size=page_size,
    )
