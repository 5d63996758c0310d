"""Comparison measures: F-measure, AP/MAP, Kendall's tau-b and DCG/nDCG.

All of them accept the same reference/hypothesis pair as :func:`rank_dcg`.
A metric that cannot be computed for an input returns :class:`Undefined`
instead of ``nan`` or ``0.0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from rankeval.core import (
    ExplicitOrder,
    Hypothesis,
    InvalidInput,
    RankedItem,
    RankedList,
    TiePolicy,
    check_cover,
    ideal_order,
    induced_tie_groups,
)
from rankeval.rankdcg import pair_sum


@dataclass(frozen=True)
class Undefined:
    reason: str

    def __post_init__(self):
        if not self.reason:
            raise ValueError("Undefined needs a reason")

    def __str__(self) -> str:
        return "nan"


MetricValue = Union[float, Undefined]


def is_defined(value: MetricValue) -> bool:
    return not isinstance(value, Undefined)


def kendall_tau_b(ref_values: Sequence[float], hyp_values: Sequence[float]) -> MetricValue:
    """Tie-corrected Kendall correlation.

    ``(c - d) / sqrt((n0 - t_ref) * (n0 - t_hyp))`` with ``n0 = n(n-1)/2``
    and ``t_*`` the number of pairs tied on that side.
    """
    if len(ref_values) != len(hyp_values):
        raise InvalidInput(f"length mismatch: {len(ref_values)} vs {len(hyp_values)}")
    n = len(ref_values)
    if n < 2:
        return Undefined("fewer than two items")
    concordant = discordant = tied_ref = tied_hyp = 0
    for i in range(n):
        for j in range(i + 1, n):
            a = ref_values[i] - ref_values[j]
            b = hyp_values[i] - hyp_values[j]
            if a == 0:
                tied_ref += 1
            if b == 0:
                tied_hyp += 1
            if a == 0 or b == 0:
                continue
            if (a > 0) == (b > 0):
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) // 2
    if tied_ref == n0:
        return Undefined("reference values are constant")
    if tied_hyp == n0:
        return Undefined("hypothesis values are constant")
    return (concordant - discordant) / math.sqrt((n0 - tied_ref) * (n0 - tied_hyp))


def predicted_values(ranked: RankedList, hyp: Hypothesis) -> dict[str, float]:
    """Per-item predicted value implied by a hypothesis.

    Scores are used as they are. An explicit order predicts, for each item,
    the reference rank found at its position in the ideal ordering, which is
    how a rank list such as ``[9, 4, 4, 2, 2, 1, 2, ...]`` is read.
    """
    if isinstance(hyp, ExplicitOrder):
        check_cover(ranked, hyp.ids)
        ideal = ideal_order(ranked)
        return {i: float(ideal[p].rank) for p, i in enumerate(hyp.ids)}
    check_cover(ranked, hyp.ids)
    return dict(hyp.scores)


def tau_b(ranked: RankedList, hyp: Hypothesis) -> MetricValue:
    predicted = predicted_values(ranked, hyp)
    return kendall_tau_b(ranked.ranks, [predicted[i] for i in ranked.ids])


def dcg(gains: Sequence[float]) -> float:
    if not len(gains):
        raise InvalidInput("dcg of an empty sequence")
    return sum(g / math.log2(i + 1) for i, g in enumerate(gains, start=1))


def _position_discounts(start: int, size: int) -> list[float]:
    return [1 / math.log2(p + 1) for p in range(start, start + size)]


def resolved_order(ranked: RankedList, hyp: Hypothesis,
                   policy: TiePolicy = TiePolicy.PESSIMISTIC) -> list[RankedItem]:
    """Break score ties: worst true rank first (pessimistic) or best first (optimistic)."""
    policy = TiePolicy(policy)
    if policy is TiePolicy.EXPECTED:
        raise InvalidInput("the expected policy has no single resolved order")
    best_first = policy is TiePolicy.OPTIMISTIC
    order = []
    for group in induced_tie_groups(ranked, hyp):
        order.extend(sorted(group.items,
                            key=lambda it: (-it.rank if best_first else it.rank, it.id)))
    return order


def ndcg(ranked: RankedList, hyp: Hypothesis,
         policy: TiePolicy = TiePolicy.PESSIMISTIC) -> MetricValue:
    """DCG of the true ranks in hypothesis order over the ideal DCG."""
    ideal = dcg([item.rank for item in ideal_order(ranked)])
    if ideal == 0:
        return Undefined("ideal DCG is zero (all ranks are 0)")
    total = 0.0
    for group in induced_tie_groups(ranked, hyp):
        weights = _position_discounts(group.start, group.size)
        total += pair_sum(weights, [float(it.rank) for it in group.items], policy)
    return total / ideal


def ndcg_raw_gain(ranked: RankedList, predicted_gains: Mapping[str, float]) -> MetricValue:
    """nDCG with the *predicted* gains in the numerator; can exceed 1.

    This is the variant that rewards over-predicting high ranks.
    """
    check_cover(ranked, predicted_gains)
    ideal = dcg([item.rank for item in ideal_order(ranked)])
    if ideal == 0:
        return Undefined("ideal DCG is zero (all ranks are 0)")
    # order among equal predictions cannot change the sum
    gains = sorted(predicted_gains.values(), reverse=True)
    return dcg(gains) / ideal


def _threshold(ranked: RankedList, relevance_threshold: int | None) -> int:
    return min(ranked.ranks) if relevance_threshold is None else relevance_threshold


def average_precision(ranked: RankedList, hyp: Hypothesis,
                      relevance_threshold: int | None = None,
                      policy: TiePolicy = TiePolicy.PESSIMISTIC) -> MetricValue:
    """Binary-relevance AP, an item being relevant when its rank exceeds the threshold.

    The threshold defaults to the lowest rank in the list. Under the expected
    policy the result is the exact mean over random orderings of each tie group.
    """
    threshold = _threshold(ranked, relevance_threshold)
    total_relevant = sum(1 for it in ranked if it.rank > threshold)
    if total_relevant == 0:
        return Undefined(f"no item has rank above {threshold}")
    policy = TiePolicy(policy)
    if policy is TiePolicy.EXPECTED:
        return _expected_ap(ranked, hyp, threshold, total_relevant)

    ap = 0.0
    hits = 0
    recall_prev = 0.0
    for k, item in enumerate(resolved_order(ranked, hyp, policy), start=1):
        hits += item.rank > threshold
        recall = hits / total_relevant
        ap += (hits / k) * abs(recall_prev - recall)
        recall_prev = recall
    return ap


def _expected_ap(ranked, hyp, threshold, total_relevant):
    # A relevant item at block slot j sees on average (j-1)(r-1)/(t-1)
    # relevant block-mates ahead of it; precision is linear in that count.
    acc = 0.0
    hits_before = 0
    seen_before = 0
    for group in induced_tie_groups(ranked, hyp):
        t = group.size
        r = sum(1 for it in group.items if it.rank > threshold)
        if r:
            share = 0.0
            for j in range(1, t + 1):
                ahead = (j - 1) * (r - 1) / (t - 1) if t > 1 else 0.0
                share += (hits_before + 1 + ahead) / (seen_before + j)
            acc += r * share / t
        hits_before += r
        seen_before += t
    return acc / total_relevant


def mean_average_precision(pairs: Iterable[tuple[RankedList, Hypothesis]],
                           relevance_threshold: int | None = None,
                           policy: TiePolicy = TiePolicy.PESSIMISTIC) -> MetricValue:
    """Arithmetic mean of AP over several reference/hypothesis pairs.

    ``relevance_threshold`` applies to every pair; ``None`` uses each list's
    own minimum rank.
    """
    values = []
    for index, (ranked, hyp) in enumerate(pairs):
        ap = average_precision(ranked, hyp, relevance_threshold, policy)
        if isinstance(ap, Undefined):
            return Undefined(f"pair {index}: {ap.reason}")
        values.append(ap)
    if not values:
        raise InvalidInput("MAP of an empty set of pairs")
    return sum(values) / len(values)


def precision_recall_f(retrieved: Iterable[str], relevant: Iterable[str]) -> tuple[float, float, float]:
    retrieved, relevant = set(retrieved), set(relevant)
    if not relevant:
        raise InvalidInput("the relevant set is empty")
    hits = len(retrieved & relevant)
    p = hits / len(retrieved) if retrieved else 0.0
    r = hits / len(relevant)
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def f_measure(ranked: RankedList, hyp: Hypothesis,
              relevance_threshold: int | None = None,
              policy: TiePolicy = TiePolicy.PESSIMISTIC) -> MetricValue:
    """F1 of the top-R cut of the hypothesis, R being the number of relevant items."""
    threshold = _threshold(ranked, relevance_threshold)
    relevant = {it.id for it in ranked if it.rank > threshold}
    if not relevant:
        return Undefined(f"no item has rank above {threshold}")
    policy = TiePolicy(policy)
    cut = len(relevant)
    if policy is not TiePolicy.EXPECTED:
        retrieved = [it.id for it in resolved_order(ranked, hyp, policy)[:cut]]
        return precision_recall_f(retrieved, relevant)[2]
    # with |retrieved| = |relevant|, p = r = f = expected hits / R
    hits = 0.0
    for group in induced_tie_groups(ranked, hyp):
        inside = max(0, min(group.size, cut - group.start + 1))
        r = sum(1 for it in group.items if it.id in relevant)
        hits += r * inside / group.size
    return hits / cut
