import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from profiler.dataset import NullMode, Table, infer_types
from profiler.errors import TypeMismatch, ValidationError
from profiler.fd import validate_fd
from profiler.mfd import (
    MfdMetric,
    MfdQuery,
    levenshtein,
    sort_clusters,
    sort_points,
    validate_mfd,
)


def numeric_table(rows, null_mode=NullMode.NULL_EQUAL):
    return infer_types(
        Table.from_rows("t", ["city", "temp"], rows, null_mode=null_mode)
    )


class TestLevenshtein:
    @pytest.mark.parametrize(
        "a,b,d",
        [
            ("", "", 0),
            ("abc", "abc", 0),
            ("kitten", "sitting", 3),
            ("flaw", "lawn", 2),
            ("", "xyz", 3),
        ],
    )
    def test_known_distances(self, a, b, d):
        assert levenshtein(a, b) == d

    @settings(max_examples=60, deadline=None)
    @given(st.text(max_size=8), st.text(max_size=8))
    def test_symmetry_and_identity(self, a, b):
        assert levenshtein(a, b) == levenshtein(b, a)
        assert levenshtein(a, a) == 0


class TestValidateMfd:
    def test_outlier_example(self):
        t = numeric_table(
            [["msk", "10"], ["msk", "12"], ["msk", "100"], ["spb", "5"]]
        )
        result = validate_mfd(
            t, MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=5.0)
        )
        assert not result.holds
        assert len(result.clusters) == 1
        points = {p.row_index: p for p in result.clusters[0].points}
        assert points[2].is_outlier
        assert points[2].max_min_distance == 88.0
        assert not points[0].is_outlier
        assert not points[1].is_outlier
        assert points[0].max_min_distance == 2.0

    def test_exact_fd_holds_at_delta_zero(self, t1):
        t = infer_types(t1)
        result = validate_mfd(
            t, MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.LEVENSHTEIN, delta=0.0)
        )
        assert result.holds and result.clusters == ()

    def test_large_delta_dominates(self):
        t = numeric_table([["a", "1"], ["a", "50"], ["a", "100"]])
        result = validate_mfd(
            t, MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=99.0)
        )
        assert result.holds

    def test_violating_cluster_without_outliers(self):
        # Chain 0-4-8 with delta 5: diameter 8 violates but every point
        # has a neighbour within 5, so nothing is marked.
        t = numeric_table([["a", "0"], ["a", "4"], ["a", "8"]])
        result = validate_mfd(
            t, MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=5.0)
        )
        assert not result.holds
        assert result.clusters[0].outlier_count == 0

    def test_euclidean_tuple_rhs(self):
        t = infer_types(
            Table.from_rows(
                "t",
                ["g", "x", "y"],
                [["a", "0", "0"], ["a", "3", "4"], ["b", "1", "1"]],
            )
        )
        q = MfdQuery(lhs=(0,), rhs=(1, 2), metric=MfdMetric.EUCLIDEAN, delta=4.9)
        result = validate_mfd(t, q)
        assert not result.holds
        assert result.clusters[0].points[0].max_min_distance == 5.0
        assert validate_mfd(
            t, MfdQuery(lhs=(0,), rhs=(1, 2), metric=MfdMetric.EUCLIDEAN, delta=5.0)
        ).holds

    def test_levenshtein_metric(self):
        t = Table.from_rows(
            "t",
            ["g", "name"],
            [["a", "moscow"], ["a", "moscov"], ["a", "paris"], ["b", "x"]],
        )
        t = infer_types(t)
        result = validate_mfd(
            t, MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.LEVENSHTEIN, delta=1.0)
        )
        assert not result.holds
        points = {p.row_index: p for p in result.clusters[0].points}
        assert points[2].is_outlier  # paris is far from both spellings
        assert not points[0].is_outlier

    def test_type_mismatch(self):
        t = numeric_table([["a", "1"], ["a", "2"]])
        with pytest.raises(TypeMismatch):
            validate_mfd(
                t, MfdQuery(lhs=(1,), rhs=(0,), metric=MfdMetric.ABSOLUTE, delta=1.0)
            )
        with pytest.raises(TypeMismatch):
            validate_mfd(
                t, MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.LEVENSHTEIN, delta=1.0)
            )

    def test_delta_must_be_non_negative(self):
        t = numeric_table([["a", "1"], ["a", "2"]])
        with pytest.raises(ValidationError):
            validate_mfd(
                t, MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=-1.0)
            )

    def test_single_row_clusters_never_violate(self):
        t = numeric_table([["a", "1"], ["b", "99"], ["c", "5"]])
        assert validate_mfd(
            t, MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=0.0)
        ).holds

    def test_null_handling_matches_fd_semantics(self):
        rows = [["a", None], ["a", "1"], ["b", None], ["b", None]]
        eq = numeric_table(rows)
        q = MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=0.0)
        res_eq = validate_mfd(eq, q)
        assert res_eq.holds == validate_fd(eq, (0,), 1, 0.0).holds
        assert not res_eq.holds  # cluster a has null vs 1

        distinct = numeric_table(rows, null_mode=NullMode.NULL_DISTINCT)
        res_d = validate_mfd(distinct, q)
        assert res_d.holds == validate_fd(distinct, (0,), 1, 0.0).holds


class TestMfdProperties:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 100_000))
    def test_delta_zero_agrees_with_exact_fd(self, seed):
        rng = random.Random(seed)
        rows = [
            [f"g{rng.randrange(3)}", str(rng.randrange(4))] for _ in range(rng.randint(2, 30))
        ]
        t = numeric_table(rows)
        q = MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=0.0)
        assert validate_mfd(t, q).holds == validate_fd(t, (0,), 1, 0.0).holds

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 100_000))
    def test_monotone_in_delta(self, seed):
        rng = random.Random(seed)
        rows = [
            [f"g{rng.randrange(3)}", str(rng.randrange(100))]
            for _ in range(rng.randint(2, 25))
        ]
        t = numeric_table(rows)
        held = False
        for delta in [0, 1, 2, 5, 10, 20, 40, 60, 80, 100]:
            q = MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=float(delta))
            holds = validate_mfd(t, q).holds
            assert not (held and not holds)  # once it holds it stays held
            held = holds
        assert held  # delta covers the max possible distance

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 100_000))
    def test_outlier_removal_leaves_neighbourly_points(self, seed):
        rng = random.Random(seed)
        rows = [
            [f"g{rng.randrange(2)}", str(rng.randrange(50))]
            for _ in range(rng.randint(3, 20))
        ]
        t = numeric_table(rows)
        delta = float(rng.randrange(1, 10))
        q = MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=delta)
        for cluster in validate_mfd(t, q).clusters:
            kept = [p for p in cluster.points if not p.is_outlier]
            values = {p.row_index: float(p.values[0]) for p in kept}
            for p in kept:
                others = [
                    abs(values[p.row_index] - values[o.row_index])
                    for o in kept
                    if o.row_index != p.row_index
                ]
                if others:
                    assert min(others) <= delta


class TestSorting:
    def test_sort_helpers(self):
        t = numeric_table(
            [["a", "0"], ["a", "100"], ["b", "7"], ["b", "9"], ["b", "90"]]
        )
        q = MfdQuery(lhs=(0,), rhs=(1,), metric=MfdMetric.ABSOLUTE, delta=3.0)
        clusters = validate_mfd(t, q).clusters
        by_outliers = sort_clusters(clusters, "outliers")
        assert by_outliers[0].outlier_count >= by_outliers[-1].outlier_count
        pts = sort_points(clusters[0].points, "distance")
        assert pts[0].max_min_distance >= pts[-1].max_min_distance
        with pytest.raises(ValidationError):
            sort_clusters(clusters, "bogus")
