"""Synthetic rank lists and controlled degradations of their ideal ordering.

Randomness comes from numpy's PCG64 bit generator seeded with the 64-bit
unsigned ``seed``; identical parameters always give identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from rankeval.baselines import MetricValue
from rankeval.core import (
    ExplicitOrder,
    Hypothesis,
    InvalidInput,
    RankedList,
    ScoreAssignment,
    TiePolicy,
    ideal_order,
)
from rankeval.evaluate import METRICS, evaluate

MAX_SEED = 2**64 - 1
DEFAULT_LEVELS = 10


def rng_for(seed: int) -> np.random.Generator:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed <= MAX_SEED:
        raise InvalidInput(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class PowerLaw:
    """Ranks ``1..levels`` drawn with probability proportional to ``rank ** -alpha``."""

    alpha: float
    levels: int = DEFAULT_LEVELS


@dataclass(frozen=True)
class Uniform:
    levels: int


@dataclass(frozen=True)
class Constructed:
    ranks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(self.ranks))


Distribution = Union[PowerLaw, Uniform, Constructed]


@dataclass(frozen=True)
class GenSpec:
    n: int
    distribution: Distribution
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise InvalidInput(f"n must be a positive integer, got {self.n!r}")
        d = self.distribution
        if isinstance(d, PowerLaw):
            if not d.alpha > 0:
                raise InvalidInput(f"alpha must be > 0, got {d.alpha!r}")
            if d.levels < 1:
                raise InvalidInput(f"levels must be >= 1, got {d.levels!r}")
        elif isinstance(d, Uniform):
            if d.levels < 1:
                raise InvalidInput(f"levels must be >= 1, got {d.levels!r}")
        elif isinstance(d, Constructed):
            if len(d.ranks) != self.n:
                raise InvalidInput(f"constructed list has {len(d.ranks)} ranks but n = {self.n}")
        else:
            raise InvalidInput(f"unknown distribution {d!r}")
        rng_for(self.seed)


def generate(spec: GenSpec) -> RankedList:
    d = spec.distribution
    if isinstance(d, Constructed):
        return RankedList.from_ranks(d.ranks)
    rng = rng_for(spec.seed)
    if isinstance(d, PowerLaw):
        support = np.arange(1, d.levels + 1)
        weights = support.astype(float) ** -d.alpha
        ranks = rng.choice(support, size=spec.n, p=weights / weights.sum())
    else:
        ranks = rng.integers(1, d.levels + 1, size=spec.n)
    return RankedList.from_ranks([int(r) for r in ranks])


@dataclass(frozen=True)
class AdjacentSwaps:
    """``k`` random transpositions of neighbouring positions."""

    k: int
    seed: int = 0


@dataclass(frozen=True)
class SubgroupShuffle:
    seed: int = 0


@dataclass(frozen=True)
class TopDisplacement:
    """Swap the top item with the one at 1-based ``target``."""

    target: int


@dataclass(frozen=True)
class Reverse:
    pass


@dataclass(frozen=True)
class MajorityClass:
    pass


Perturbation = Union[AdjacentSwaps, SubgroupShuffle, TopDisplacement, Reverse, MajorityClass]


def majority_rank(ranked: RankedList) -> int:
    """Most frequent rank; the lowest wins a frequency tie."""
    counts: dict[int, int] = {}
    for r in ranked.ranks:
        counts[r] = counts.get(r, 0) + 1
    return min(counts, key=lambda r: (-counts[r], r))


def perturb(ranked: RankedList, op: Perturbation) -> Hypothesis:
    ids = [item.id for item in ideal_order(ranked)]
    if isinstance(op, Reverse):
        return ExplicitOrder(tuple(reversed(ids)))
    if isinstance(op, MajorityClass):
        value = float(majority_rank(ranked))
        return ScoreAssignment({i: value for i in ranked.ids})
    if isinstance(op, TopDisplacement):
        if not 1 <= op.target <= len(ids):
            raise InvalidInput(f"target position {op.target} outside 1..{len(ids)}")
        ids[0], ids[op.target - 1] = ids[op.target - 1], ids[0]
        return ExplicitOrder(tuple(ids))
    if isinstance(op, AdjacentSwaps):
        if op.k < 0:
            raise InvalidInput(f"swap count must be >= 0, got {op.k}")
        rng = rng_for(op.seed)
        if len(ids) > 1:
            for i in rng.integers(0, len(ids) - 1, size=op.k):
                ids[i], ids[i + 1] = ids[i + 1], ids[i]
        return ExplicitOrder(tuple(ids))
    if isinstance(op, SubgroupShuffle):
        rng = rng_for(op.seed)
        rank_of = ranked.by_id
        out, block = [], []
        for i in ids + [None]:
            if block and (i is None or rank_of[i].rank != rank_of[block[0]].rank):
                out.extend(block[j] for j in rng.permutation(len(block)))
                block = []
            if i is not None:
                block.append(i)
        return ExplicitOrder(tuple(out))
    raise InvalidInput(f"unknown perturbation {op!r}")


FAMILIES = ("adjacent-swaps", "subgroup-shuffle", "top-displacement", "reverse", "majority-class")


def step_perturbation(family: str, step: int, n: int, seed: int) -> Perturbation | None:
    """Degradation applied at ``step``; ``None`` means the ideal ordering."""
    if step == 0:
        return None
    if family == "adjacent-swaps":
        # same seed at every step: step s+1 extends the swaps of step s
        return AdjacentSwaps(step, seed)
    if family == "subgroup-shuffle":
        return SubgroupShuffle((seed + step) % (MAX_SEED + 1))
    if family == "top-displacement":
        return TopDisplacement(min(step + 1, n))
    if family == "reverse":
        return Reverse()
    if family == "majority-class":
        return MajorityClass()
    raise InvalidInput(f"unknown perturbation family {family!r}; choose from {', '.join(FAMILIES)}")


@dataclass(frozen=True)
class SweepRow:
    step: int
    metric: str
    score: MetricValue


def degradation_sweep(
    spec: GenSpec,
    family: str,
    steps: int,
    metrics: Sequence[str] = METRICS,
    policy: TiePolicy = TiePolicy.PESSIMISTIC,
    ap_threshold: int | None = None,
) -> list[SweepRow]:
    """Evaluate the metrics at steps ``0..steps`` of one degradation family.

    Families ``reverse`` and ``majority-class`` have a single degraded state,
    so every step after 0 repeats it.
    """
    if steps < 1:
        raise InvalidInput(f"steps must be >= 1, got {steps}")
    if family not in FAMILIES:
        raise InvalidInput(f"unknown perturbation family {family!r}; choose from {', '.join(FAMILIES)}")
    ranked = generate(spec)
    ideal = ExplicitOrder(tuple(item.id for item in ideal_order(ranked)))
    rows = []
    for step in range(steps + 1):
        op = step_perturbation(family, step, ranked.n, spec.seed)
        hyp = ideal if op is None else perturb(ranked, op)
        for name, score in evaluate(ranked, hyp, metrics, policy, ap_threshold).items():
            rows.append(SweepRow(step, name, score))
    return rows
