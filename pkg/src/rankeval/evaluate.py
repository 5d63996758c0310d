"""Metric registry: evaluate a hypothesis under any selection of named metrics."""

from __future__ import annotations

from typing import Sequence

from rankeval.baselines import (
    MetricValue,
    average_precision,
    f_measure,
    ndcg,
    ndcg_raw_gain,
    predicted_values,
    tau_b,
)
from rankeval.core import Hypothesis, InvalidInput, RankedList, TiePolicy
from rankeval.rankdcg import rank_dcg

METRICS = ("rankdcg", "ndcg", "ndcg-raw", "tau-b", "ap", "map", "f1")


def parse_metrics(spec: str | Sequence[str]) -> tuple[str, ...]:
    """Split and validate a metric selection such as ``"rankdcg,tau-b"``."""
    names = spec.split(",") if isinstance(spec, str) else list(spec)
    names = [n.strip().lower() for n in names if n.strip()]
    unknown = [n for n in names if n not in METRICS]
    if unknown:
        raise InvalidInput(f"unknown metric(s): {', '.join(unknown)}; "
                           f"choose from {', '.join(METRICS)}")
    if not names:
        raise InvalidInput("no metric selected")
    return tuple(dict.fromkeys(names))


def evaluate(
    ranked: RankedList,
    hyp: Hypothesis,
    metrics: Sequence[str] = ("rankdcg",),
    policy: TiePolicy = TiePolicy.PESSIMISTIC,
    ap_threshold: int | None = None,
) -> dict[str, MetricValue]:
    """Score one hypothesis; ``map`` of a single pair is its AP."""
    metrics = parse_metrics(metrics)
    out: dict[str, MetricValue] = {}
    for name in metrics:
        if name == "rankdcg":
            out[name] = rank_dcg(ranked, hyp, policy).normalized
        elif name == "ndcg":
            out[name] = ndcg(ranked, hyp, policy)
        elif name == "ndcg-raw":
            out[name] = ndcg_raw_gain(ranked, predicted_values(ranked, hyp))
        elif name == "tau-b":
            out[name] = tau_b(ranked, hyp)
        elif name in ("ap", "map"):
            out[name] = average_precision(ranked, hyp, ap_threshold, policy)
        elif name == "f1":
            out[name] = f_measure(ranked, hyp, ap_threshold, policy)
    return out
