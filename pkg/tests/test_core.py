import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankeval.core import (
    ExplicitOrder,
    HypothesisMismatch,
    InvalidInput,
    RankedItem,
    RankedList,
    ScoreAssignment,
    TiePolicy,
    build_mapping,
    ideal_order,
    induced_tie_groups,
    order_from_ranks,
)

from conftest import PAPER_RANKS

rank_lists = st.lists(st.integers(min_value=0, max_value=30), min_size=1, max_size=25)


def _gains_in_ideal_order(ranked):
    mapping = build_mapping(ranked)
    return ([mapping.gain[it.rank] for it in ideal_order(ranked)],
            [mapping.discount[it.rank] for it in ideal_order(ranked)])


def test_mapping_of_paper_list(paper_list):
    gains, discounts = _gains_in_ideal_order(paper_list)
    assert gains == [4, 3, 3, 2, 2, 2, 1, 1, 1, 1]
    assert discounts == [1, 2, 2, 3, 3, 3, 4, 4, 4, 4]
    assert build_mapping(paper_list).m == 4


@pytest.mark.parametrize("ranks", [[5], [7, 7, 7]])
def test_mapping_single_level(ranks):
    gains, discounts = _gains_in_ideal_order(RankedList.from_ranks(ranks))
    assert gains == [1] * len(ranks)
    assert discounts == [1] * len(ranks)


def test_rank_zero_is_lowest_level():
    mapping = build_mapping(RankedList.from_ranks([0, 3, 0]))
    assert mapping.gain == {3: 2, 0: 1}


@given(rank_lists)
def test_mapping_invariants(ranks):
    mapping = build_mapping(RankedList.from_ranks(ranks))
    assert mapping.m == len(set(ranks))
    assert mapping.gain[max(ranks)] == mapping.m
    for r1 in mapping.unique_ranks:
        assert mapping.gain[r1] + mapping.discount[r1] == mapping.m + 1
        for r2 in mapping.unique_ranks:
            if r1 > r2:
                assert mapping.gain[r1] > mapping.gain[r2]


@given(rank_lists, st.sampled_from([lambda r: r + 5, lambda r: 3 * r, lambda r: r * r]))
def test_mapping_ignores_monotone_transforms(ranks, f):
    before = _gains_in_ideal_order(RankedList.from_ranks(ranks))
    after = _gains_in_ideal_order(RankedList.from_ranks([f(r) for r in ranks]))
    assert before == after


def test_ideal_order_sorts_by_rank_then_id():
    ranked = RankedList.from_mapping({"a": 1, "b": 9, "c": 4})
    assert [it.id for it in ideal_order(ranked)] == ["b", "c", "a"]
    ranked = RankedList.from_mapping({"b": 2, "a": 2})
    assert [it.id for it in ideal_order(ranked)] == ["a", "b"]


def test_ideal_order_of_paper_list(paper_list):
    assert [it.rank for it in ideal_order(paper_list)] == list(PAPER_RANKS)


@pytest.mark.parametrize("bad", [-1, 1.5, True, "3"])
def test_rank_must_be_non_negative_int(bad):
    with pytest.raises(InvalidInput):
        RankedItem("a", bad)


def test_list_rejects_empty_and_duplicates():
    with pytest.raises(InvalidInput):
        RankedList(())
    with pytest.raises(InvalidInput):
        RankedList((RankedItem("a", 1), RankedItem("a", 2)))
    with pytest.raises(InvalidInput):
        RankedList.from_ranks([])


def test_tie_groups_explicit_order():
    ranked = RankedList.from_mapping({"a": 1, "b": 9, "c": 4})
    groups = induced_tie_groups(ranked, ExplicitOrder(("b", "c", "a")))
    assert [[it.id for it in g.items] for g in groups] == [["b"], ["c"], ["a"]]
    assert [list(g.positions) for g in groups] == [[1], [2], [3]]


def test_tie_groups_scores():
    ranked = RankedList.from_mapping({"a": 1, "b": 9, "c": 4})
    groups = induced_tie_groups(ranked, ScoreAssignment({"a": 0.5, "b": 0.5, "c": 0.9}))
    assert [[it.id for it in g.items] for g in groups] == [["c"], ["a", "b"]]
    assert [list(g.positions) for g in groups] == [[1], [2, 3]]


def test_tie_groups_constant_scores(paper_list):
    groups = induced_tie_groups(paper_list, ScoreAssignment({i: 2.0 for i in paper_list.ids}))
    assert len(groups) == 1
    assert list(groups[0].positions) == list(range(1, 11))


@given(rank_lists, st.randoms(use_true_random=False))
def test_tie_groups_of_explicit_order_are_singletons(ranks, rnd):
    ranked = RankedList.from_ranks(ranks)
    ids = list(ranked.ids)
    rnd.shuffle(ids)
    groups = induced_tie_groups(ranked, ExplicitOrder(ids))
    assert [g.items[0].id for g in groups] == ids
    assert [g.start for g in groups] == list(range(1, len(ids) + 1))


@pytest.mark.parametrize("hyp, missing, extra", [
    (ExplicitOrder(("a", "b")), ("c",), ()),
    (ExplicitOrder(("a", "b", "c", "z")), (), ("z",)),
    (ScoreAssignment({"a": 1.0, "b": 1.0, "q": 2.0}), ("c",), ("q",)),
])
def test_tie_groups_reject_mismatch(hyp, missing, extra):
    ranked = RankedList.from_mapping({"a": 1, "b": 9, "c": 4})
    with pytest.raises(HypothesisMismatch) as info:
        induced_tie_groups(ranked, hyp)
    assert info.value.missing == missing
    assert info.value.extra == extra


def test_duplicate_ids_in_order_rejected():
    ranked = RankedList.from_mapping({"a": 1, "b": 2})
    with pytest.raises(HypothesisMismatch) as info:
        induced_tie_groups(ranked, ExplicitOrder(("a", "a", "b")))
    assert info.value.duplicated == ("a",)


def test_order_from_ranks(paper_list):
    order = order_from_ranks(paper_list, (1, 4, 4, 2, 2, 2, 9, 1, 1, 1))
    placed = [paper_list.by_id[i].rank for i in order.ids]
    assert placed == [1, 4, 4, 2, 2, 2, 9, 1, 1, 1]
    with pytest.raises(InvalidInput):
        order_from_ranks(paper_list, (9, 9, 4, 2, 2, 2, 1, 1, 1, 1))


def test_scores_must_be_finite():
    with pytest.raises(InvalidInput):
        ScoreAssignment({"a": float("nan")})


def test_default_policy_value():
    assert TiePolicy("pessimistic") is TiePolicy.PESSIMISTIC
