import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from profiler.arm import (
    ItemsetResult,
    TransactionSet,
    derive_rules,
    load_transactions_text,
    mine_frequent_itemsets,
)
from profiler.errors import EmptyTransactions, NotDownwardClosed, ValidationError

from oracles import frequent_itemsets_bruteforce, rules_bruteforce

CLASSIC = [
    ["bread", "milk"],
    ["bread", "diaper", "beer"],
    ["milk", "diaper", "beer"],
    ["bread", "milk", "diaper", "beer"],
    ["bread", "milk", "diaper"],
]


@pytest.fixture
def classic():
    return TransactionSet.from_item_lists(CLASSIC)


def named(txns, results):
    return {
        tuple(sorted(txns.item_names[i] for i in r.items)): r.support for r in results
    }


class TestMining:
    @pytest.mark.parametrize("algorithm", ["apriori", "fpgrowth"])
    def test_classic_example(self, classic, algorithm):
        got = named(classic, mine_frequent_itemsets(classic, 0.6, algorithm))
        expected = {
            ("bread",): 0.8,
            ("milk",): 0.8,
            ("diaper",): 0.8,
            ("beer",): 0.6,
            ("bread", "milk"): 0.6,
            ("bread", "diaper"): 0.6,
            ("diaper", "milk"): 0.6,
            ("beer", "diaper"): 0.6,
        }
        assert got == expected

    def test_classic_matches_enumeration_oracle(self, classic):
        oracle = frequent_itemsets_bruteforce(classic.transactions, 0.6)
        mined = {
            r.items: r.count for r in mine_frequent_itemsets(classic, 0.6, "apriori")
        }
        assert mined == oracle
        assert len(mined) == 8

    def test_no_common_item_full_support(self):
        txns = TransactionSet.from_item_lists([["a"], ["b"]])
        assert mine_frequent_itemsets(txns, 1.0) == []

    def test_single_transaction(self):
        txns = TransactionSet.from_item_lists([["a"]])
        got = mine_frequent_itemsets(txns, 1.0)
        assert len(got) == 1
        assert got[0].support == 1.0
        assert txns.item_names[got[0].items[0]] == "a"

    def test_output_ordering(self, classic):
        results = mine_frequent_itemsets(classic, 0.4)
        keys = [(len(r.items), r.items) for r in results]
        assert keys == sorted(keys)

    def test_bad_support_rejected(self, classic):
        for bad in (0.0, 1.5, -0.1):
            with pytest.raises(ValidationError):
                mine_frequent_itemsets(classic, bad)

    def test_unknown_algorithm(self, classic):
        with pytest.raises(ValidationError):
            mine_frequent_itemsets(classic, 0.5, "eclat")

    def test_empty_transactions_rejected(self):
        with pytest.raises(EmptyTransactions):
            TransactionSet.from_item_lists([])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 100_000))
    def test_algorithms_agree_and_match_oracle(self, seed):
        rng = random.Random(seed)
        n_items = rng.randint(1, 12)
        lists = [
            [f"i{j}" for j in range(n_items) if rng.random() < 0.4] or [f"i{rng.randrange(n_items)}"]
            for _ in range(rng.randint(1, 40))
        ]
        txns = TransactionSet.from_item_lists(lists)
        min_support = rng.choice([0.1, 0.2, 0.3, 0.5])
        apriori = mine_frequent_itemsets(txns, min_support, "apriori")
        fpgrowth = mine_frequent_itemsets(txns, min_support, "fpgrowth")
        assert apriori == fpgrowth
        oracle = frequent_itemsets_bruteforce(txns.transactions, min_support)
        assert {r.items: r.count for r in apriori} == oracle

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 100_000))
    def test_anti_monotone_support(self, seed):
        rng = random.Random(seed)
        lists = [
            [f"i{j}" for j in range(6) if rng.random() < 0.5] or ["i0"]
            for _ in range(rng.randint(2, 30))
        ]
        txns = TransactionSet.from_item_lists(lists)
        results = {r.items: r.support for r in mine_frequent_itemsets(txns, 0.2)}
        for items, support in results.items():
            if len(items) < 2:
                continue
            for drop in range(len(items)):
                subset = items[:drop] + items[drop + 1 :]
                assert subset in results
                assert results[subset] >= support


class TestRules:
    def test_diaper_to_beer(self, classic):
        itemsets = mine_frequent_itemsets(classic, 0.6)
        rules = derive_rules(itemsets, 0.7)
        by_name = {
            (
                tuple(sorted(classic.item_names[i] for i in r.antecedent)),
                tuple(sorted(classic.item_names[i] for i in r.consequent)),
            ): r
            for r in rules
        }
        rule = by_name[(("diaper",), ("beer",))]
        assert rule.confidence == 0.75
        assert rule.support == 0.6

    def test_rules_match_bruteforce(self, classic):
        itemsets = mine_frequent_itemsets(classic, 0.4)
        got = {
            (r.antecedent, r.consequent): (r.support, r.confidence)
            for r in derive_rules(itemsets, 0.6)
        }
        expected = rules_bruteforce(classic.transactions, 0.4, 0.6)
        assert got.keys() == expected.keys()
        for key, (sup, conf) in expected.items():
            assert got[key][0] == pytest.approx(sup, abs=1e-12)
            assert got[key][1] == pytest.approx(conf, abs=1e-12)

    def test_min_confidence_above_max_yields_empty(self):
        # No certain rule here: a and b co-occur only half the time each.
        txns = TransactionSet.from_item_lists([["a", "b"], ["a"], ["b"], ["a", "b"]])
        itemsets = mine_frequent_itemsets(txns, 0.25)
        max_conf = max(r.confidence for r in derive_rules(itemsets, 0.01))
        assert max_conf < 1.0
        assert derive_rules(itemsets, 1.0) == []

    def test_single_itemset_produces_no_rules(self):
        assert derive_rules([ItemsetResult((0,), 1.0, 5)], 0.5) == []

    def test_not_downward_closed(self):
        broken = [ItemsetResult((0, 1), 0.5, 2)]
        with pytest.raises(NotDownwardClosed):
            derive_rules(broken, 0.5)

    def test_sides_non_empty_and_disjoint(self, classic):
        for r in derive_rules(mine_frequent_itemsets(classic, 0.4), 0.3):
            assert r.antecedent and r.consequent
            assert not set(r.antecedent) & set(r.consequent)

    def test_bad_confidence_rejected(self, classic):
        itemsets = mine_frequent_itemsets(classic, 0.6)
        with pytest.raises(ValidationError):
            derive_rules(itemsets, 0.0)


class TestLoading:
    def test_singular_layout(self):
        text = "t1,bread\nt1,milk\nt2,bread\n"
        txns = load_transactions_text(text, layout="singular")
        assert len(txns.transactions) == 2
        assert set(txns.item_names) == {"bread", "milk"}

    def test_tabular_layout(self):
        text = "t1,bread,milk\nt2,bread,,\n"
        txns = load_transactions_text(text, layout="tabular")
        assert len(txns.transactions) == 2
        assert len(txns.transactions[0]) == 2
        assert len(txns.transactions[1]) == 1

    def test_duplicates_within_transaction_collapse(self):
        txns = load_transactions_text("t1,a\nt1,a\n", layout="singular")
        assert len(txns.transactions[0]) == 1

    def test_layout_validation(self):
        with pytest.raises(ValidationError):
            load_transactions_text("a,b,c\n", layout="singular")
        with pytest.raises(EmptyTransactions):
            load_transactions_text("a\n", layout="tabular")  # id cell, no items
        with pytest.raises(ValidationError):
            load_transactions_text("a,b\n", layout="sideways")

    def test_classic_via_csv(self):
        rows = []
        for i, items in enumerate(CLASSIC):
            rows.extend(f"t{i},{item}" for item in items)
        txns = load_transactions_text("\n".join(rows), layout="singular")
        got = named(txns, mine_frequent_itemsets(txns, 0.6))
        assert got[("beer", "diaper")] == 0.6
