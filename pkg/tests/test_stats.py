import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from profiler.dataset import ColumnType, Table, infer_types
from profiler.errors import EmptyInput
from profiler.stats import profile_table


def col_table(cells, name="a"):
    return infer_types(Table.from_rows("t", [name], [[c] for c in cells]))


class TestProfile:
    def test_numeric_with_null(self):
        stats = profile_table(col_table(["3", None, "5"]))[0]
        assert stats.inferred_type == ColumnType.INTEGER
        assert stats.min == 3 and stats.max == 5
        assert stats.null_count == 1
        assert stats.distinct_count == 2
        assert stats.mean == 4.0
        assert stats.std_dev == 1.0

    def test_all_null_column(self):
        stats = profile_table(col_table([None, None]))[0]
        assert stats.null_count == 2
        assert stats.min is None and stats.max is None
        assert stats.mean is None and stats.std_dev is None
        assert stats.distinct_count == 0

    def test_text_lexicographic(self):
        stats = profile_table(col_table(["b", "a", "a"]))[0]
        assert stats.min == "a" and stats.max == "b"
        assert stats.distinct_count == 2
        assert stats.mean is None

    def test_real_column(self):
        stats = profile_table(col_table(["1.5", "2.5"]))[0]
        assert stats.inferred_type == ColumnType.REAL
        assert stats.mean == 2.0
        assert stats.min == 1.5

    def test_population_std_dev(self):
        stats = profile_table(col_table(["1", "2", "3", "4"]))[0]
        # population variance of 1..4 is 1.25
        assert stats.std_dev == pytest.approx(1.25**0.5)

    def test_empty_table_rejected(self):
        with pytest.raises(EmptyInput):
            profile_table(Table.from_rows("t", ["a"], []))

    def test_counts_add_up(self):
        t = infer_types(
            Table.from_rows(
                "t",
                ["a", "b"],
                [["1", None], [None, "x"], ["2", "y"], ["1", "y"]],
            )
        )
        for stats in profile_table(t):
            assert stats.null_count <= stats.row_count
            assert stats.distinct_count <= stats.row_count - stats.null_count

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 100_000))
    def test_permutation_invariant(self, seed):
        rng = random.Random(seed)
        cells = [
            None if rng.random() < 0.2 else str(rng.randrange(10))
            for _ in range(rng.randint(1, 40))
        ]
        base = profile_table(col_table(cells))[0]
        shuffled = cells[:]
        rng.shuffle(shuffled)
        perm = profile_table(col_table(shuffled))[0]
        assert perm == base

    def test_distinct_matches_dictionary(self):
        t = col_table(["x", "y", "x", None])
        stats = profile_table(t)[0]
        assert stats.distinct_count == t.columns[0].distinct_count == 2
