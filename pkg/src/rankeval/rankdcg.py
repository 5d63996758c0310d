"""rankDCG: a DCG variant for discrete ranks with many ties.

Gains and discounts come from the compressed rank mapping rather than from
raw rank values and positions:

* each *position* ``i`` carries the gain of the rank the ideal ordering puts
  there (the fixed sequence ``m, ..., 1`` expanded over subgroups);
* each *item* carries a discount equal to the reversed mapping of its true
  rank, ``m + 1 - gain``.

``DCG' = sum_i gain(ideal rank at i) / discount(item placed at i)`` is then
min-max normalized between the reversed and the ideal orderings.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from rankeval.core import (
    ExplicitOrder,
    Hypothesis,
    InvalidInput,
    RankedItem,
    RankedList,
    RankMapping,
    TiePolicy,
    build_mapping,
    check_cover,
    ideal_order,
    induced_tie_groups,
)


class CostVariant(str, enum.Enum):
    DCG_LOG = "dcg-log"
    BURGES_EXP = "burges-exp"
    RELPRIME_LINEAR = "relprime-linear"
    RANKDCG = "rankdcg"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RankDcgBreakdown:
    dcg_prime: float
    max_dcg_prime: float
    min_dcg_prime: float
    normalized: float
    degenerate: bool = False

    def __float__(self) -> float:
        return self.normalized


def position_gains(ranked: RankedList, mapping: RankMapping | None = None) -> tuple[int, ...]:
    """Gain attached to each position 1..n, i.e. the mapped ideal ordering."""
    mapping = mapping or build_mapping(ranked)
    return tuple(mapping.gain[item.rank] for item in ideal_order(ranked))


def _as_items(ranked: RankedList, order) -> list[RankedItem]:
    if isinstance(order, ExplicitOrder):
        order = order.ids
    ids = [o.id if isinstance(o, RankedItem) else o for o in order]
    check_cover(ranked, ids)
    return [ranked.by_id[i] for i in ids]


def dcg_prime(ranked: RankedList, order: Sequence[RankedItem] | Sequence[str] | ExplicitOrder) -> float:
    """Unnormalized rankDCG accumulator for a full ordering of ``ranked``.

    ``order`` may hold items, ids, or be an :class:`ExplicitOrder`.
    """
    mapping = build_mapping(ranked)
    gains = position_gains(ranked, mapping)
    placed = _as_items(ranked, order)
    return sum(g / mapping.discount[item.rank] for g, item in zip(gains, placed))


def extrema(ranked: RankedList) -> tuple[float, float]:
    """Return ``(min, max)`` of DCG' over all orderings of ``ranked``.

    The maximum is reached by the ideal ordering and the minimum by its
    reverse (gains are non-increasing along positions and the discounts of
    the reversed ordering are non-increasing too, so the rearrangement
    inequality pins both ends).
    """
    ideal = ideal_order(ranked)
    return dcg_prime(ranked, ideal[::-1]), dcg_prime(ranked, ideal)


def pair_sum(weights: Sequence[float], values: Sequence[float], policy: TiePolicy) -> float:
    """Sum of ``weights[p] * values[x]`` over an assignment chosen by ``policy``.

    Pessimistic takes the minimizing assignment, optimistic the maximizing one
    and expected the mean over all assignments (exact by linearity).
    """
    if len(weights) != len(values):
        raise InvalidInput(f"{len(weights)} positions but {len(values)} items")
    if not weights:
        return 0.0
    policy = TiePolicy(policy)
    w = sorted(weights, reverse=True)
    if policy is TiePolicy.EXPECTED:
        return sum(w) * (sum(values) / len(values))
    v = sorted(values, reverse=policy is TiePolicy.OPTIMISTIC)
    return sum(a * b for a, b in zip(w, v))


def tie_group_contribution(
    gains: Sequence[int],
    items: Sequence[RankedItem],
    mapping: RankMapping,
    policy: TiePolicy = TiePolicy.PESSIMISTIC,
) -> float:
    """DCG' share of one block of tied positions.

    ``gains`` are the position gains of the block and ``items`` the items the
    hypothesis could not separate.
    """
    if len(gains) != len(items):
        raise InvalidInput(f"{len(gains)} positions but {len(items)} items")
    if len(items) == 1:
        return gains[0] / mapping.discount[items[0].rank]
    policy = TiePolicy(policy)
    if policy is TiePolicy.EXPECTED:
        return pair_sum(gains, [1 / mapping.discount[it.rank] for it in items], policy)
    # large discounts first is the worst pairing for descending gains
    discounts = sorted((mapping.discount[it.rank] for it in items),
                       reverse=policy is TiePolicy.PESSIMISTIC)
    return sum(g / d for g, d in zip(sorted(gains, reverse=True), discounts))


def rank_dcg(
    ranked: RankedList,
    hyp: Hypothesis,
    policy: TiePolicy = TiePolicy.PESSIMISTIC,
) -> RankDcgBreakdown:
    """Score a hypothesis against the reference list with rankDCG.

    Score ties in a :class:`ScoreAssignment` are resolved by ``policy``;
    an :class:`ExplicitOrder` has no ties and ignores it. Lists with a
    single distinct rank cannot be ordered wrongly and score 1.0 with
    ``degenerate`` set.
    """
    mapping = build_mapping(ranked)
    gains = position_gains(ranked, mapping)
    total = 0.0
    for group in induced_tie_groups(ranked, hyp):
        block = gains[group.start - 1:group.start - 1 + group.size]
        total += tie_group_contribution(block, group.items, mapping, policy)

    lo, hi = extrema(ranked)
    if mapping.m == 1:
        return RankDcgBreakdown(total, hi, lo, 1.0, degenerate=True)
    normalized = min(1.0, max(0.0, (total - lo) / (hi - lo)))
    return RankDcgBreakdown(total, hi, lo, normalized)


def cost_curve(ranked: RankedList, variant: CostVariant | str) -> list[tuple[int, float]]:
    """Per-position cost of the ideal ordering under one of four cost functions."""
    variant = CostVariant(variant)
    mapping = build_mapping(ranked)
    curve = []
    for i, item in enumerate(ideal_order(ranked), start=1):
        if variant is CostVariant.DCG_LOG:
            cost = item.rank / math.log2(i + 1)
        elif variant is CostVariant.BURGES_EXP:
            try:
                cost = (2.0 ** item.rank - 1) / math.log2(i + 1)
            except OverflowError:
                cost = math.inf
        elif variant is CostVariant.RELPRIME_LINEAR:
            cost = mapping.gain[item.rank] / i
        else:
            cost = mapping.gain[item.rank] / mapping.discount[item.rank]
        curve.append((i, cost))
    return curve
