"""Evaluation measures for rank-ordering problems with discrete, tied ranks.

The headline measure is :func:`rank_dcg`; the usual IR baselines live in
:mod:`rankeval.baselines` for side-by-side comparison.
"""

from rankeval.core import (
    ExplicitOrder,
    HypothesisMismatch,
    InstanceTooLarge,
    InvalidInput,
    ParseError,
    RankedItem,
    RankedList,
    RankEvalError,
    RankMapping,
    ScoreAssignment,
    TiePolicy,
    build_mapping,
    ideal_order,
    induced_tie_groups,
)
from rankeval.rankdcg import (
    RankDcgBreakdown,
    cost_curve,
    dcg_prime,
    extrema,
    rank_dcg,
    tie_group_contribution,
)

__all__ = [
    "ExplicitOrder",
    "HypothesisMismatch",
    "InstanceTooLarge",
    "InvalidInput",
    "ParseError",
    "RankDcgBreakdown",
    "RankEvalError",
    "RankMapping",
    "RankedItem",
    "RankedList",
    "ScoreAssignment",
    "TiePolicy",
    "build_mapping",
    "cost_curve",
    "dcg_prime",
    "extrema",
    "ideal_order",
    "induced_tie_groups",
    "rank_dcg",
    "tie_group_contribution",
]

__version__ = "0.1.0"
