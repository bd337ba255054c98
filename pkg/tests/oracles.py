"""Independent brute-force oracles used to check the real implementations.

Everything here works from first principles on raw cell values: row-pair
scans for dependencies, exhaustive row-removal search for the error
measure, subset enumeration for itemsets, set containment for
inclusions.  None of it shares code with the partition/lattice/mining
machinery it verifies.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import chain, combinations

from profiler.dataset import NullMode, Table


def cells_equal(a, b, null_mode: NullMode) -> bool:
    if a is None or b is None:
        if a is None and b is None:
            return null_mode is NullMode.NULL_EQUAL
        return False
    return a == b


def raw_matrix(table: Table) -> list[tuple]:
    """Rows as raw-value tuples, for fast repeated pair scanning."""
    return [table.row(r) for r in range(table.row_count)]


def rows_agree(table: Table, r1: int, r2: int, cols) -> bool:
    return all(
        cells_equal(table.cell(r1, c), table.cell(r2, c), table.null_mode) for c in cols
    )


def fd_holds_pairscan(table: Table, lhs, rhs, rows=None, matrix=None) -> bool:
    """Row-pair scan: equal lhs on a pair must imply equal rhs."""
    matrix = matrix if matrix is not None else raw_matrix(table)
    mode = table.null_mode
    rows = list(rows) if rows is not None else list(range(len(matrix)))
    for i in range(len(rows)):
        a = matrix[rows[i]]
        for j in range(i + 1, len(rows)):
            b = matrix[rows[j]]
            if all(cells_equal(a[c], b[c], mode) for c in lhs) and not cells_equal(
                a[rhs], b[rhs], mode
            ):
                return False
    return True


def g3_exhaustive(table: Table, lhs, rhs) -> tuple[int, int]:
    """Minimal number of rows to remove so lhs -> rhs holds, by search.

    Tries every removal set of size 0, 1, 2, ... until the dependency
    holds on the remainder.  Returns (removals, row_count).
    """
    n = table.row_count
    all_rows = list(range(n))
    matrix = raw_matrix(table)
    for k in range(n + 1):
        for removed in combinations(all_rows, k):
            keep = [r for r in all_rows if r not in removed]
            if fd_holds_pairscan(table, lhs, rhs, rows=keep, matrix=matrix):
                return k, n
    raise AssertionError("unreachable: removing all rows always holds")


def all_column_subsets(m: int, exclude: int, max_size: int):
    cols = [c for c in range(m) if c != exclude]
    return chain.from_iterable(combinations(cols, k) for k in range(min(max_size, len(cols)) + 1))


def minimal_exact_fds(table: Table, max_lhs: int) -> set[tuple[tuple[int, ...], int]]:
    """Brute-force minimal exact dependencies.

    A dependency is minimal when no non-empty proper lhs subset holds;
    empty-lhs (constant column) findings are reported independently and
    do not shadow others.
    """
    m = len(table.columns)
    if m < 2:
        return set()
    matrix = raw_matrix(table)
    holding: set[tuple[tuple[int, ...], int]] = set()
    for rhs in range(m):
        for lhs in all_column_subsets(m, rhs, max_lhs):
            if fd_holds_pairscan(table, lhs, rhs, matrix=matrix):
                holding.add((tuple(lhs), rhs))
    minimal = set()
    for lhs, rhs in holding:
        if lhs == ():
            minimal.add((lhs, rhs))
            continue
        shadowed = any(
            (sub, rhs) in holding
            for k in range(1, len(lhs))
            for sub in combinations(lhs, k)
        )
        if not shadowed:
            minimal.add((lhs, rhs))
    return minimal


def minimal_approximate_fds(
    table: Table, max_lhs: int, threshold: float
) -> dict[tuple[tuple[int, ...], int], Fraction]:
    """Brute-force minimal dependencies within a g3 threshold.

    Uses the exhaustive removal search for every candidate, so it is
    slow and only suitable for tiny tables.  Same minimality convention
    as the implementation: empty-lhs findings are independent and never
    shadow non-empty candidates.
    """
    m = len(table.columns)
    if m < 2:
        return {}
    cut = Fraction(threshold)
    errors: dict[tuple[tuple[int, ...], int], Fraction] = {}
    for rhs in range(m):
        for lhs in all_column_subsets(m, rhs, max_lhs):
            k, n = g3_exhaustive(table, lhs, rhs)
            errors[(tuple(lhs), rhs)] = Fraction(k, n)
    out = {}
    for (lhs, rhs), err in errors.items():
        if err > cut:
            continue
        if lhs == ():
            out[(lhs, rhs)] = err
            continue
        shadowed = any(
            errors[(sub, rhs)] <= cut
            for k_ in range(1, len(lhs))
            for sub in combinations(lhs, k_)
        )
        if not shadowed:
            out[(lhs, rhs)] = err
    return out


def stripped_partition_by_grouping(table: Table, cols) -> frozenset[frozenset[int]]:
    """Group rows by their raw value tuple; drop singletons."""
    groups: dict[tuple, list[int]] = {}
    for r in range(table.row_count):
        key = []
        skip = False
        for c in cols:
            v = table.cell(r, c)
            if v is None and table.null_mode is NullMode.NULL_DISTINCT:
                skip = True
                break
            key.append(("\0null", ) if v is None else ("v", v))
        if skip:
            continue
        groups.setdefault(tuple(key), []).append(r)
    return frozenset(frozenset(g) for g in groups.values() if len(g) >= 2)


def ind_holds_bruteforce(dep_values, ref_values) -> bool:
    dep = {v for v in dep_values if v is not None}
    ref = {v for v in ref_values if v is not None}
    return dep <= ref


def frequent_itemsets_bruteforce(transactions, min_support: float):
    """Enumerate every subset of the item universe and count containment.

    Threshold semantics mirror the package contract: comparisons happen
    at the exact rational value of the given number.
    """
    n = len(transactions)
    cut = Fraction(min_support)
    universe = sorted(set().union(*transactions)) if transactions else []
    out = {}
    for k in range(1, len(universe) + 1):
        for items in combinations(universe, k):
            s = set(items)
            count = sum(1 for t in transactions if s <= t)
            if count and Fraction(count, n) >= cut:
                out[items] = count
    return out


def rules_bruteforce(transactions, min_support: float, min_confidence: float):
    frequent = frequent_itemsets_bruteforce(transactions, min_support)
    n = len(transactions)
    cut = Fraction(min_confidence)
    rules = {}
    for items, count in frequent.items():
        if len(items) < 2:
            continue
        for k in range(1, len(items)):
            for ante in combinations(items, k):
                cons = tuple(i for i in items if i not in ante)
                if Fraction(count, frequent[ante]) >= cut:
                    rules[(ante, cons)] = (count / n, count / frequent[ante])
    return rules


def random_table(
    rng: random.Random,
    *,
    max_cols: int = 6,
    max_rows: int = 100,
    alphabet_range: tuple[int, int] = (2, 5),
    null_fraction: float = 0.0,
    null_mode: NullMode = NullMode.NULL_EQUAL,
    name: str = "random",
) -> Table:
    cols = rng.randint(2, max_cols)
    rows = rng.randint(2, max_rows)
    alphabets = [rng.randint(*alphabet_range) for _ in range(cols)]
    data = []
    for _ in range(rows):
        row = []
        for c in range(cols):
            if null_fraction and rng.random() < null_fraction:
                row.append(None)
            else:
                row.append(f"v{rng.randrange(alphabets[c])}")
        data.append(row)
    return Table.from_rows(
        name,
        [f"c{i}" for i in range(cols)],
        data,
        null_mode=null_mode,
    )
