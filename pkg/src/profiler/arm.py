"""Frequent itemset mining (Apriori and FP-Growth) and rule derivation.

Transactions are item-id sets over a first-occurrence item dictionary.
Support is always a fraction of the transaction count.  Threshold cuts
(min_support, min_confidence) are applied at the exact rational value of
the given number, so a threshold like 0.6 over 5 transactions keeps
itemsets occurring in exactly 3; pass a ``Fraction`` where the float
rounding of a boundary matters.

Both algorithms return the same itemsets, ordered by size then item ids;
FP-Growth orders tree items by descending global frequency with item-id
tie-break.  Rules are derived from support-closed itemset collections
only: both sides non-empty and disjoint, confidence =
support(antecedent ∪ consequent) / support(antecedent).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .control import RunControl
from .dataset import parse_csv_rows
from .errors import EmptyTransactions, NotDownwardClosed, ValidationError


@dataclass(frozen=True)
class TransactionSet:
    transactions: tuple[frozenset[int], ...]
    item_names: tuple[str, ...]

    def __post_init__(self):
        if not self.transactions:
            raise EmptyTransactions("at least one transaction is required")

    @staticmethod
    def from_item_lists(lists: Iterable[Iterable[str]]) -> "TransactionSet":
        """Assign item ids in first-occurrence order; duplicates collapse."""
        ids: dict[str, int] = {}
        txns = []
        for items in lists:
            txn = set()
            for item in items:
                if item not in ids:
                    ids[item] = len(ids)
                txn.add(ids[item])
            txns.append(frozenset(txn))
        if not txns:
            raise EmptyTransactions("no transactions in input")
        names = [""] * len(ids)
        for name, i in ids.items():
            names[i] = name
        return TransactionSet(tuple(txns), tuple(names))

    def render_items(self, items: Sequence[int]) -> str:
        return "{" + ", ".join(self.item_names[i] for i in items) + "}"


@dataclass(frozen=True)
class ItemsetResult:
    items: tuple[int, ...]
    support: float
    count: Optional[int] = None


@dataclass(frozen=True)
class Rule:
    antecedent: tuple[int, ...]
    consequent: tuple[int, ...]
    support: float
    confidence: float


def load_transactions_text(
    text: str,
    *,
    separator: str = ",",
    has_header: bool = False,
    layout: str = "singular",
) -> TransactionSet:
    """Read transactions from CSV text.

    ``singular`` expects two columns (transaction id, item), one item per
    row; ``tabular`` expects one row per transaction with the id in the
    first cell and items in the remaining cells, rows may differ in width
    and empty cells are skipped.  Transaction order follows first
    occurrence of each id.
    """
    rows = parse_csv_rows(text, separator)
    if has_header:
        rows = rows[1:]
    if not rows:
        raise EmptyTransactions("no transactions in input")
    if layout == "singular":
        by_tid: dict[str, list[str]] = {}
        for i, row in enumerate(rows):
            if len(row) != 2:
                raise ValidationError(
                    f"singular layout needs exactly 2 cells per row, row {i} has {len(row)}"
                )
            tid, item = row
            if tid is None or item is None:
                continue
            by_tid.setdefault(tid, []).append(item)
        return TransactionSet.from_item_lists(by_tid.values())
    if layout == "tabular":
        lists = []
        for row in rows:
            items = [v for v in row[1:] if v is not None]
            if items:
                lists.append(items)
        return TransactionSet.from_item_lists(lists)
    raise ValidationError(f"unknown transaction layout {layout!r}")


def load_transactions(path: str, **kwargs) -> TransactionSet:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return load_transactions_text(f.read(), **kwargs)


def _min_count(min_support: float, n: int) -> int:
    """Smallest absolute count whose support fraction reaches the cut."""
    return max(1, math.ceil(Fraction(min_support) * n))


def mine_frequent_itemsets(
    txns: TransactionSet,
    min_support: float,
    algorithm: str = "apriori",
    *,
    control: Optional[RunControl] = None,
) -> list[ItemsetResult]:
    """All itemsets with support >= min_support, by (size, item ids)."""
    if not 0.0 < min_support <= 1.0:
        raise ValidationError("min_support must lie in (0, 1]")
    if algorithm == "apriori":
        counts = _apriori(txns, min_support, control)
    elif algorithm == "fpgrowth":
        counts = _fpgrowth(txns, min_support, control)
    else:
        raise ValidationError(f"unknown mining algorithm {algorithm!r}")
    n = len(txns.transactions)
    return [
        ItemsetResult(items=items, support=counts[items] / n, count=counts[items])
        for items in sorted(counts, key=lambda it: (len(it), it))
    ]


def _apriori(
    txns: TransactionSet, min_support: float, control: Optional[RunControl]
) -> dict[tuple[int, ...], int]:
    transactions = txns.transactions
    minc = _min_count(min_support, len(transactions))
    item_counts: dict[int, int] = {}
    for t in transactions:
        for i in t:
            item_counts[i] = item_counts.get(i, 0) + 1
    frequent: dict[tuple[int, ...], int] = {
        (i,): c for i, c in item_counts.items() if c >= minc
    }
    level = sorted((i,) for i in item_counts if item_counts[i] >= minc)
    k = 2
    while level:
        if control is not None:
            control.checkpoint()
        candidates = _apriori_join(level, k)
        if not candidates:
            break
        counts = {c: 0 for c in candidates}
        sets = {c: frozenset(c) for c in candidates}
        for t in transactions:
            for c in candidates:
                if sets[c] <= t:
                    counts[c] += 1
        level = sorted(c for c, cnt in counts.items() if cnt >= minc)
        for c in level:
            frequent[c] = counts[c]
        k += 1
    return frequent


def _apriori_join(level: list[tuple[int, ...]], k: int) -> list[tuple[int, ...]]:
    """Join step: merge (k-1)-itemsets sharing a (k-2)-prefix, then prune."""
    prev = set(level)
    out = []
    for a, b in combinations(level, 2):
        if a[:-1] != b[:-1]:
            continue
        cand = a + (b[-1],) if a[-1] < b[-1] else b + (a[-1],)
        if all(cand[:i] + cand[i + 1 :] in prev for i in range(len(cand))):
            out.append(cand)
    return sorted(set(out))


class _FpNode:
    __slots__ = ("item", "count", "parent", "children", "link")

    def __init__(self, item: int, parent: Optional["_FpNode"]):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children: dict[int, _FpNode] = {}
        self.link: Optional[_FpNode] = None


def _build_tree(
    weighted: Iterable[tuple[tuple[int, ...], int]],
    item_counts: dict[int, int],
    minc: int,
) -> tuple[_FpNode, dict[int, _FpNode]]:
    """FP-tree over ordered transactions; header chains per item."""
    order = {
        item: rank
        for rank, item in enumerate(
            sorted(
                (i for i, c in item_counts.items() if c >= minc),
                key=lambda i: (-item_counts[i], i),
            )
        )
    }
    root = _FpNode(-1, None)
    header: dict[int, _FpNode] = {}
    tails: dict[int, _FpNode] = {}
    for items, weight in weighted:
        path = sorted((i for i in items if i in order), key=order.__getitem__)
        node = root
        for item in path:
            child = node.children.get(item)
            if child is None:
                child = _FpNode(item, node)
                node.children[item] = child
                if item in tails:
                    tails[item].link = child
                else:
                    header[item] = child
                tails[item] = child
            child.count += weight
            node = child
    return root, header


def _fpgrowth(
    txns: TransactionSet, min_support: float, control: Optional[RunControl]
) -> dict[tuple[int, ...], int]:
    transactions = txns.transactions
    minc = _min_count(min_support, len(transactions))
    item_counts: dict[int, int] = {}
    for t in transactions:
        for i in t:
            item_counts[i] = item_counts.get(i, 0) + 1
    out: dict[tuple[int, ...], int] = {}
    weighted = [(tuple(t), 1) for t in transactions]
    _mine_tree(weighted, item_counts, minc, (), out, control)
    return out


def _mine_tree(
    weighted: list[tuple[tuple[int, ...], int]],
    item_counts: dict[int, int],
    minc: int,
    suffix: tuple[int, ...],
    out: dict[tuple[int, ...], int],
    control: Optional[RunControl],
) -> None:
    if control is not None:
        control.checkpoint()
    _, header = _build_tree(weighted, item_counts, minc)
    # Least-frequent first, so conditional bases stay small.
    items = sorted(
        (i for i, c in item_counts.items() if c >= minc),
        key=lambda i: (item_counts[i], -i),
    )
    for item in items:
        itemset = tuple(sorted(suffix + (item,)))
        out[itemset] = item_counts[item]
        # Conditional pattern base: prefix paths of every node of `item`.
        base: list[tuple[tuple[int, ...], int]] = []
        cond_counts: dict[int, int] = {}
        node = header.get(item)
        while node is not None:
            path = []
            parent = node.parent
            while parent is not None and parent.item != -1:
                path.append(parent.item)
                parent = parent.parent
            if path:
                base.append((tuple(reversed(path)), node.count))
                for p in path:
                    cond_counts[p] = cond_counts.get(p, 0) + node.count
            node = node.link
        if any(c >= minc for c in cond_counts.values()):
            _mine_tree(base, cond_counts, minc, itemset, out, control)


def derive_rules(
    itemsets: Sequence[ItemsetResult],
    min_confidence: float,
    *,
    control: Optional[RunControl] = None,
) -> list[Rule]:
    """All rules with confidence >= min_confidence from frequent itemsets.

    Requires the collection to be support-closed: every non-empty subset
    of a listed itemset must itself be listed.
    """
    if not 0.0 < min_confidence <= 1.0:
        raise ValidationError("min_confidence must lie in (0, 1]")
    by_items: dict[tuple[int, ...], ItemsetResult] = {
        tuple(sorted(r.items)): r for r in itemsets
    }
    exact = all(r.count is not None for r in itemsets)
    min_conf = Fraction(min_confidence)
    rules = []
    for result in itemsets:
        items = tuple(sorted(result.items))
        if len(items) < 2:
            continue
        if control is not None:
            control.checkpoint()
        for size in range(1, len(items)):
            for antecedent in combinations(items, size):
                ante = by_items.get(antecedent)
                if ante is None:
                    raise NotDownwardClosed(
                        f"support of subset {antecedent} is missing"
                    )
                consequent = tuple(i for i in items if i not in antecedent)
                if exact:
                    keep = Fraction(result.count, ante.count) >= min_conf
                    conf_value = result.count / ante.count
                else:
                    conf_value = result.support / ante.support
                    keep = Fraction(conf_value) >= min_conf
                if keep:
                    rules.append(
                        Rule(
                            antecedent=antecedent,
                            consequent=consequent,
                            support=result.support,
                            confidence=conf_value,
                        )
                    )
    rules.sort(key=lambda r: (len(r.antecedent) + len(r.consequent), r.antecedent, r.consequent))
    return rules
