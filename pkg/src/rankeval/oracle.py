"""Exhaustive checks of rankDCG over every permutation of small lists.

The enumeration computes the rank compression and DCG' itself with numpy so
that it does not share a code path with :mod:`rankeval.rankdcg`; only the
closed-form extrema and a sample of :func:`rank_dcg` calls are taken from
the implementation under test.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from rankeval.baselines import Undefined, ndcg, tau_b
from rankeval.core import (
    ExplicitOrder,
    InstanceTooLarge,
    InvalidInput,
    RankedList,
    ScoreAssignment,
    TiePolicy,
    induced_tie_groups,
    order_from_ranks,
)
from rankeval.rankdcg import extrema, rank_dcg

MAX_N = 10
TOL = 1e-9
_CHUNK = 1 << 17
_SAMPLED_CALLS = 24

TABLE1_REFERENCE = (9, 4, 4, 2, 2, 2, 1, 1, 1, 1)

# hypothesis rank sequence -> published (tau, AveP, nDCG, rankDCG)
TABLE1_ROWS = (
    ((9, 4, 4, 2, 2, 2, 1, 1, 1, 1), (1.0, 1.0, 1.0, 1.0)),
    ((9, 4, 4, 2, 2, 1, 2, 1, 1, 1), (0.8, 0.887, 0.998, 0.975)),
    ((4, 4, 2, 9, 2, 2, 1, 1, 1, 1), (0.742, 0.454, 0.825, 0.65)),
    ((1, 4, 4, 2, 2, 2, 9, 1, 1, 1), (0.285, 0.659, 0.688, 0.325)),
    ((1, 4, 4, 2, 2, 2, 1, 1, 1, 9), (0.285, 0.697, 0.667, 0.325)),
    ((1, 1, 1, 1, 2, 2, 2, 4, 4, 9), (-0.8, 0.149, 0.571, 0.0)),
)

TABLE1_TOLERANCE = {"rankdcg": 0.001, "tau-b": 0.002, "ndcg": 0.002}
REJECTED_ROW3 = 0.75


@lru_cache(maxsize=None)
def permutation_matrix(n: int) -> np.ndarray:
    """All permutations of ``range(n)`` in lexicographic order, one per row."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    smaller = permutation_matrix(n - 1)
    blocks = []
    for first in range(n):
        rest = np.array([x for x in range(n) if x != first], dtype=np.int8)
        block = np.empty((smaller.shape[0], n), dtype=np.int8)
        block[:, 0] = first
        block[:, 1:] = rest[smaller]
        blocks.append(block)
    out = np.concatenate(blocks)
    out.setflags(write=False)
    return out


def _compressed(ranks: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Return (position gains of the sorted list, per-item discounts, m)."""
    levels = np.unique(ranks)  # ascending
    m = len(levels)
    item_gain = np.searchsorted(levels, ranks) + 1
    position_gain = np.sort(item_gain)[::-1]
    return position_gain.astype(float), (m + 1 - item_gain).astype(float), m


@dataclass(frozen=True)
class Enumeration:
    ranks: tuple[int, ...]
    permutations: np.ndarray
    dcg_prime: np.ndarray
    normalized: np.ndarray
    degenerate: bool

    def __len__(self) -> int:
        return len(self.dcg_prime)

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], float, float]]:
        for perm, raw, norm in zip(self.permutations, self.dcg_prime, self.normalized):
            yield tuple(int(p) for p in perm), float(raw), float(norm)


def _check_size(ranks: Sequence[int]) -> None:
    if not 1 <= len(ranks) <= MAX_N:
        if len(ranks) > MAX_N:
            raise InstanceTooLarge(f"n = {len(ranks)} exceeds the enumeration cap of {MAX_N}")
        raise InvalidInput("need at least one rank")


def enumerate_scores(ranks: Sequence[int]) -> Enumeration:
    """Score every assignment of the given items to positions.

    Items are the entries of ``ranks`` (equal ranks stay distinct items).
    Row ``k`` of ``permutations`` lists which item sits at each position.
    """
    _check_size(ranks)
    ranks = tuple(int(r) for r in ranks)
    rank_arr = np.array(ranks)
    gains, discounts, m = _compressed(rank_arr)
    perms = permutation_matrix(len(ranks))
    raw = np.empty(perms.shape[0])
    for lo in range(0, perms.shape[0], _CHUNK):
        chunk = perms[lo:lo + _CHUNK]
        raw[lo:lo + _CHUNK] = (gains / discounts[chunk]).sum(axis=1)
    closed_min, closed_max = extrema(RankedList.from_ranks(ranks))
    if m == 1:
        norm = np.ones_like(raw)
    else:
        norm = (raw - closed_min) / (closed_max - closed_min)
    return Enumeration(ranks, perms, raw, norm, m == 1)


@dataclass
class OracleReport:
    description: str
    permutation_count: int
    observed_min: float
    observed_max: float
    closed_min: float
    closed_max: float
    degenerate: bool = False
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _sample_rows(count: int, k: int) -> list[int]:
    if count <= k:
        return list(range(count))
    step = count / k
    return sorted({int(i * step) for i in range(k)} | {count - 1})


def verify_instance(ranks: Sequence[int]) -> OracleReport:
    """Run every exhaustive check on one rank multiset."""
    enum = enumerate_scores(ranks)
    ranks = enum.ranks
    closed_min, closed_max = extrema(RankedList.from_ranks(ranks))
    report = OracleReport(
        description=f"ranks {list(ranks)}",
        permutation_count=len(enum),
        observed_min=float(enum.dcg_prime.min()),
        observed_max=float(enum.dcg_prime.max()),
        closed_min=closed_min,
        closed_max=closed_max,
        degenerate=enum.degenerate,
    )
    bad = report.violations
    where = report.description

    if abs(report.observed_min - closed_min) > TOL:
        bad.append(f"extrema: {where}: enumerated min {report.observed_min!r} != closed form {closed_min!r}")
    if abs(report.observed_max - closed_max) > TOL:
        bad.append(f"extrema: {where}: enumerated max {report.observed_max!r} != closed form {closed_max!r}")

    norm = enum.normalized
    if norm.min() < -TOL or norm.max() > 1 + TOL:
        bad.append(f"range: {where}: normalized score outside [0, 1] "
                   f"(min {norm.min()!r}, max {norm.max()!r})")

    # placed rank sequence per permutation; equal sequences must score equally
    rank_arr = np.array(ranks)
    seqs = rank_arr[enum.permutations]
    _, inverse = np.unique(seqs, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    hi = np.full(inverse.max() + 1, -np.inf)
    lo = np.full(inverse.max() + 1, np.inf)
    np.maximum.at(hi, inverse, enum.dcg_prime)
    np.minimum.at(lo, inverse, enum.dcg_prime)
    if np.any(hi - lo > TOL):
        bad.append(f"subgroup: {where}: permuting equal-rank items changed the score "
                   f"(spread {float((hi - lo).max())!r})")

    steps = np.diff(seqs, axis=1)
    non_increasing = np.all(steps <= 0, axis=1)
    non_decreasing = np.all(steps >= 0, axis=1)
    is_one = np.abs(norm - 1) <= TOL
    is_zero = np.abs(norm) <= TOL
    mismatch = np.flatnonzero(is_one != non_increasing)
    if mismatch.size:
        k = mismatch[0]
        bad.append(f"top: {where}: ordering {seqs[k].tolist()} scores {float(norm[k])!r}, "
                   "breaking score 1 <=> non-increasing")
    mismatch = np.flatnonzero(is_zero != non_decreasing)
    if not enum.degenerate and mismatch.size:
        k = mismatch[0]
        bad.append(f"bottom: {where}: ordering {seqs[k].tolist()} scores {float(norm[k])!r}, "
                   "breaking score 0 <=> non-decreasing")

    ranked = RankedList.from_ranks(ranks)
    ids = ranked.ids
    for row in _sample_rows(len(enum), _SAMPLED_CALLS):
        perm = enum.permutations[row]
        got = rank_dcg(ranked, ExplicitOrder(tuple(ids[p] for p in perm)))
        if abs(got.dcg_prime - enum.dcg_prime[row]) > TOL or abs(got.normalized - norm[row]) > TOL:
            bad.append(f"implementation: {where}: rank_dcg disagrees with enumeration on permutation "
                       f"{[int(p) for p in perm]}: {got.normalized!r} vs {float(norm[row])!r}")
    return report


@dataclass(frozen=True)
class SweepSummary:
    """Merged outcome of many instance checks; merging is order independent."""

    instances: int = 0
    permutations: int = 0
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def violations_of(self, check: str) -> tuple[str, ...]:
        """Violations raised by one check (extrema, range, subgroup, top, bottom, implementation)."""
        return tuple(v for v in self.violations if v.startswith(check + ":"))

    def merge(self, other: SweepSummary) -> SweepSummary:
        return SweepSummary(self.instances + other.instances,
                            self.permutations + other.permutations,
                            tuple(sorted(self.violations + other.violations)))

    @classmethod
    def of(cls, report: OracleReport) -> SweepSummary:
        return cls(1, report.permutation_count, tuple(sorted(report.violations)))


def multisets(values: Sequence[int], max_n: int) -> Iterator[tuple[int, ...]]:
    """Every sorted multiset of ``values`` with 1..max_n elements."""
    values = sorted(set(values), reverse=True)
    for n in range(1, max_n + 1):
        yield from itertools.combinations_with_replacement(values, n)


def _verify_many(batch: Sequence[tuple[int, ...]]) -> SweepSummary:
    out = SweepSummary()
    for ranks in batch:
        out = out.merge(SweepSummary.of(verify_instance(ranks)))
    return out


def sweep(values: Sequence[int] = (1, 2, 3, 4), max_n: int = 8, workers: int = 1) -> SweepSummary:
    if max_n > MAX_N:
        raise InstanceTooLarge(f"max_n = {max_n} exceeds {MAX_N}")
    instances = list(multisets(values, max_n))
    if workers <= 1:
        return _verify_many(instances)
    batches = [instances[i::workers * 4] for i in range(workers * 4)]
    out = SweepSummary()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_verify_many, batches):
            out = out.merge(part)
    return out


def rejected_reading(ranked: RankedList, order: ExplicitOrder) -> float:
    """Normalized score under the alternative reading of DCG'.

    Here the numerator is the gain of the placed item and the denominator the
    discount of the position. It matches the adopted reading on most rows but
    not on row 3 of the published comparison, which is why it was dropped.
    """
    levels = sorted(set(ranked.ranks), reverse=True)
    m = len(levels)
    gain = {r: m - i for i, r in enumerate(levels)}
    ideal = sorted(ranked.ranks, reverse=True)
    position_discount = [m + 1 - gain[r] for r in ideal]

    def raw(seq):
        return sum(gain[r] / d for r, d in zip(seq, position_discount))

    placed = [ranked.by_id[i].rank for i in order.ids]
    lo, hi = raw(ideal[::-1]), raw(ideal)
    return 1.0 if hi == lo else (raw(placed) - lo) / (hi - lo)


@dataclass(frozen=True)
class ReplayRow:
    index: int
    hypothesis: tuple[int, ...]
    expected: dict
    observed: dict
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def replay_table1() -> list[ReplayRow]:
    """Re-evaluate the published six-row comparison on the constructed list."""
    ranked = RankedList.from_ranks(TABLE1_REFERENCE)
    rows = []
    for index, (seq, (tau_exp, _avep, ndcg_exp, rdcg_exp)) in enumerate(TABLE1_ROWS, start=1):
        order = order_from_ranks(ranked, seq)
        expected = {"rankdcg": rdcg_exp, "tau-b": tau_exp, "ndcg": ndcg_exp}
        observed = {
            "rankdcg": rank_dcg(ranked, order).normalized,
            "tau-b": tau_b(ranked, order),
            "ndcg": ndcg(ranked, order),
        }
        failures = []
        for name, want in expected.items():
            got = observed[name]
            if isinstance(got, Undefined) or abs(got - want) > TABLE1_TOLERANCE[name]:
                failures.append(f"{name}: got {got}, expected {want} "
                                f"+/- {TABLE1_TOLERANCE[name]}")
        if index == 3:
            alt = rejected_reading(ranked, order)
            observed["rejected-reading"] = alt
            expected["rejected-reading"] = REJECTED_ROW3
            if abs(alt - REJECTED_ROW3) > TOL:
                failures.append(f"rejected reading: got {alt}, expected {REJECTED_ROW3}")
            if abs(alt - rdcg_exp) <= TABLE1_TOLERANCE["rankdcg"]:
                failures.append("rejected reading unexpectedly reproduces the published value")
        rows.append(ReplayRow(index, seq, expected, observed, tuple(failures)))
    return rows


def tie_resolutions(ranked: RankedList, hyp: ScoreAssignment) -> Iterator[ExplicitOrder]:
    """Every explicit order obtainable by breaking the hypothesis' score ties."""
    groups = induced_tie_groups(ranked, hyp)
    choices = [itertools.permutations(g.items) for g in groups]
    for combo in itertools.product(*(list(c) for c in choices)):
        yield ExplicitOrder(tuple(it.id for block in combo for it in block))


def brute_force_policy_scores(ranked: RankedList, hyp: ScoreAssignment) -> dict[TiePolicy, float]:
    """Min, mean and max normalized rankDCG over all tie resolutions."""
    scores = [rank_dcg(ranked, order).normalized for order in tie_resolutions(ranked, hyp)]
    return {
        TiePolicy.PESSIMISTIC: min(scores),
        TiePolicy.EXPECTED: math.fsum(scores) / len(scores),
        TiePolicy.OPTIMISTIC: max(scores),
    }
