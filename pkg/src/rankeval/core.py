"""Ranked lists, hypotheses and the rank-compression mapping shared by all metrics."""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union


class RankEvalError(Exception):
    """Base class for errors raised by rankeval."""


class InvalidInput(RankEvalError, ValueError):
    pass


class InstanceTooLarge(InvalidInput):
    pass


class HypothesisMismatch(RankEvalError):
    """A hypothesis does not cover exactly the ids of its reference list."""

    def __init__(self, missing=(), extra=(), duplicated=()):
        self.missing = tuple(sorted(missing))
        self.extra = tuple(sorted(extra))
        self.duplicated = tuple(sorted(duplicated))
        parts = []
        if self.missing:
            parts.append("missing ids: " + ", ".join(self.missing))
        if self.extra:
            parts.append("unknown ids: " + ", ".join(self.extra))
        if self.duplicated:
            parts.append("duplicated ids: " + ", ".join(self.duplicated))
        super().__init__("; ".join(parts) or "hypothesis does not match reference")


class ParseError(RankEvalError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class RankedItem:
    id: str
    rank: int

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise InvalidInput(f"item id must be a non-empty string, got {self.id!r}")
        if self.id != self.id.strip() or "\n" in self.id or "\r" in self.id:
            raise InvalidInput(f"item id {self.id!r} has surrounding whitespace or a line break")
        # bool is an int subclass but never a meaningful rank
        if isinstance(self.rank, bool) or not isinstance(self.rank, int):
            raise InvalidInput(f"rank of {self.id!r} must be an integer, got {self.rank!r}")
        if self.rank < 0:
            raise InvalidInput(f"rank of {self.id!r} must be >= 0, got {self.rank}")


@dataclass(frozen=True)
class RankedList:
    """Reference items with their true ranks (higher rank = better)."""

    items: tuple[RankedItem, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise InvalidInput("a ranked list needs at least one item")
        counts = Counter(item.id for item in self.items)
        dup = sorted(i for i, c in counts.items() if c > 1)
        if dup:
            raise InvalidInput("duplicate ids: " + ", ".join(dup))

    @classmethod
    def from_ranks(cls, ranks: Sequence[int], ids: Sequence[str] | None = None) -> RankedList:
        """Build a list from bare ranks; ids default to ``x1..xn`` zero-padded."""
        if ids is None:
            width = len(str(len(ranks)))
            ids = [f"x{i:0{width}d}" for i in range(1, len(ranks) + 1)]
        if len(ids) != len(ranks):
            raise InvalidInput("ids and ranks differ in length")
        return cls(tuple(RankedItem(i, r) for i, r in zip(ids, ranks)))

    @classmethod
    def from_mapping(cls, ranks: Mapping[str, int]) -> RankedList:
        return cls(tuple(RankedItem(i, r) for i, r in ranks.items()))

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(item.id for item in self.items)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(item.rank for item in self.items)

    @cached_property
    def by_id(self) -> dict[str, RankedItem]:
        return {item.id: item for item in self.items}

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


@dataclass(frozen=True)
class RankMapping:
    """Compression of the distinct ranks of a list onto ``m..1``.

    ``gain[r]`` is the compressed value of rank ``r`` (top rank gets ``m``),
    ``discount[r]`` is the reversed mapping ``m + 1 - gain[r]``.
    """

    unique_ranks: tuple[int, ...]
    gain: Mapping[int, int]
    discount: Mapping[int, int]

    @property
    def m(self) -> int:
        return len(self.unique_ranks)


class TiePolicy(str, enum.Enum):
    PESSIMISTIC = "pessimistic"
    OPTIMISTIC = "optimistic"
    EXPECTED = "expected"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ExplicitOrder:
    """A proposed ordering of ids, best first."""

    ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))


@dataclass(frozen=True)
class ScoreAssignment:
    """Real-valued predictions per id; higher is better and ties are kept."""

    scores: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        scores = dict(self.scores)
        for key, value in scores.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidInput(f"score of {key!r} is not a number: {value!r}")
            if not math.isfinite(value):
                raise InvalidInput(f"score of {key!r} is not finite: {value!r}")
            scores[key] = float(value)
        object.__setattr__(self, "scores", scores)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.scores)

    def __hash__(self):
        return hash(tuple(sorted(self.scores.items())))


Hypothesis = Union[ExplicitOrder, ScoreAssignment]


@dataclass(frozen=True)
class TieGroup:
    """Items sharing one hypothesis score, placed on positions ``start..start+size-1``."""

    items: tuple[RankedItem, ...]
    start: int
    score: float | None = None

    @property
    def size(self) -> int:
        return len(self.items)

    @property
    def positions(self) -> range:
        return range(self.start, self.start + len(self.items))


def build_mapping(ranked: RankedList) -> RankMapping:
    if not len(ranked):
        raise InvalidInput("cannot build a mapping for an empty list")
    unique = tuple(sorted({item.rank for item in ranked}, reverse=True))
    m = len(unique)
    gain = {r: m - i for i, r in enumerate(unique)}
    discount = {r: m + 1 - g for r, g in gain.items()}
    return RankMapping(unique_ranks=unique, gain=gain, discount=discount)


def ideal_order(ranked: RankedList) -> tuple[RankedItem, ...]:
    """Items by rank descending; equal ranks ordered by id."""
    if not len(ranked):
        raise InvalidInput("empty list")
    return tuple(sorted(ranked.items, key=lambda it: (-it.rank, it.id)))


def check_cover(ranked: RankedList, ids: Iterable[str]) -> None:
    """Raise HypothesisMismatch unless ``ids`` is exactly the id set of ``ranked``."""
    ids = list(ids)
    counts = Counter(ids)
    known = ranked.by_id
    missing = set(known) - set(counts)
    extra = set(counts) - set(known)
    duplicated = {i for i, c in counts.items() if c > 1}
    if missing or extra or duplicated:
        raise HypothesisMismatch(missing, extra, duplicated)


def induced_tie_groups(ranked: RankedList, hyp: Hypothesis) -> tuple[TieGroup, ...]:
    check_cover(ranked, hyp.ids)
    items = ranked.by_id
    if isinstance(hyp, ExplicitOrder):
        return tuple(TieGroup((items[i],), pos) for pos, i in enumerate(hyp.ids, start=1))

    by_score: dict[float, list[RankedItem]] = {}
    for item_id, score in hyp.scores.items():
        by_score.setdefault(score, []).append(items[item_id])
    groups = []
    start = 1
    for score in sorted(by_score, reverse=True):
        members = tuple(sorted(by_score[score], key=lambda it: it.id))
        groups.append(TieGroup(members, start, score))
        start += len(members)
    return tuple(groups)


def order_from_ranks(ranked: RankedList, rank_sequence: Sequence[int]) -> ExplicitOrder:
    """Realize a sequence of rank values as an ordering of the list's items.

    Items of equal rank are consumed in id order, so a table row such as
    ``[9, 4, 4, 2, ...]`` turns into a concrete permutation.
    """
    if sorted(rank_sequence) != sorted(ranked.ranks):
        raise InvalidInput("rank sequence is not a rearrangement of the list's ranks")
    pools: dict[int, list[str]] = {}
    for item in reversed(ideal_order(ranked)):
        pools.setdefault(item.rank, []).append(item.id)
    return ExplicitOrder(tuple(pools[r].pop() for r in rank_sequence))
