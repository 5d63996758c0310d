"""Reading and writing references, hypotheses and metric reports.

Reference files are ``id,rank`` CSV or JSON lines with ``id``/``rank`` keys.
Hypotheses are either an order (one id per line, best first) or scores
(``id,score`` CSV, or JSON lines with ``id``/``score``).
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO, Union

from rankeval.baselines import MetricValue, Undefined
from rankeval.core import (
    ExplicitOrder,
    Hypothesis,
    InvalidInput,
    ParseError,
    RankedItem,
    RankedList,
    ScoreAssignment,
)

Source = Union[str, Path, TextIO]

FORMATS = ("csv", "jsonl")
MODES = ("order", "scores")
REPORT_FORMATS = ("table", "csv", "json")

_UINT = re.compile(r"[0-9]+")


def guess_format(path: str | Path) -> str:
    return "jsonl" if str(path).lower().endswith((".jsonl", ".ndjson")) else "csv"


def _read_text(source: Source) -> str:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8-sig", newline="") as fh:
            return fh.read()
    text = source.read()
    return text[1:] if text.startswith("\ufeff") else text


def _check_format(fmt: str) -> None:
    if fmt not in FORMATS:
        raise InvalidInput(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def _parse_rank(text: str, line: int) -> int:
    text = text.strip()
    if not _UINT.fullmatch(text):
        raise ParseError(f"rank must be a non-negative integer, got {text!r}", line)
    return int(text)


def _parse_score(text, line: int) -> float:
    if isinstance(text, bool):
        raise ParseError(f"score must be a number, got {text!r}", line)
    try:
        value = float(text.strip() if isinstance(text, str) else text)
    except (TypeError, ValueError):
        raise ParseError(f"score must be a number, got {text!r}", line) from None
    if not math.isfinite(value):
        raise ParseError(f"score must be finite, got {text!r}", line)
    return value


def _csv_records(text: str, header: tuple[str, ...]) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line number, fields)`` for each data record after the header."""
    reader = csv.reader(io.StringIO(text, newline=""))
    first = True
    for fields in reader:
        line = reader.line_num
        if not fields or (len(fields) == 1 and not fields[0].strip()):
            continue
        if first:
            first = False
            if tuple(f.strip().lower() for f in fields) != header:
                raise ParseError(f"expected header {','.join(header)!r}, got {','.join(fields)!r}", line)
            continue
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(fields)}", line)
        yield line, fields


def _lines(text: str) -> list[str]:
    # only LF/CRLF end a line; ids may contain other Unicode separators
    return [raw[:-1] if raw.endswith("\r") else raw for raw in text.split("\n")]


def _json_records(text: str) -> Iterator[tuple[int, dict]]:
    for line, raw in enumerate(_lines(text), start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line) from None
        if not isinstance(record, dict):
            raise ParseError("each line must be a JSON object", line)
        yield line, record


def _json_id(record: dict, line: int) -> str:
    value = record.get("id")
    if not isinstance(value, str) or not value:
        raise ParseError("field 'id' must be a non-empty string", line)
    return value


def _claim(seen: set, item_id: str, line: int) -> None:
    if not item_id:
        raise ParseError("empty id", line)
    if item_id in seen:
        raise ParseError(f"duplicate id {item_id!r}", line)
    seen.add(item_id)


def parse_reference(source: Source, fmt: str = "csv") -> RankedList:
    _check_format(fmt)
    text = _read_text(source)
    items, seen = [], set()
    if fmt == "csv":
        for line, (item_id, rank) in _csv_records(text, ("id", "rank")):
            item_id = item_id.strip()
            _claim(seen, item_id, line)
            items.append(RankedItem(item_id, _parse_rank(rank, line)))
    else:
        for line, record in _json_records(text):
            item_id = _json_id(record, line)
            rank = record.get("rank")
            if isinstance(rank, bool) or not isinstance(rank, int) or rank < 0:
                raise ParseError(f"field 'rank' must be a non-negative integer, got {rank!r}", line)
            _claim(seen, item_id, line)
            items.append(RankedItem(item_id, rank))
    if not items:
        raise ParseError("no records in input")
    return RankedList(tuple(items))


def parse_hypothesis(source: Source, fmt: str = "csv", mode: str = "order") -> Hypothesis:
    """Parse a hypothesis file; ids are checked against a reference only when paired."""
    _check_format(fmt)
    if mode not in MODES:
        raise InvalidInput(f"unknown hypothesis mode {mode!r}; choose from {', '.join(MODES)}")
    text = _read_text(source)
    seen: set[str] = set()
    if mode == "order":
        ids = []
        if fmt == "csv":
            for line, raw in enumerate(_lines(text), start=1):
                item_id = raw.strip()
                if item_id:
                    _claim(seen, item_id, line)
                    ids.append(item_id)
        else:
            for line, record in _json_records(text):
                item_id = _json_id(record, line)
                _claim(seen, item_id, line)
                ids.append(item_id)
        if not ids:
            raise ParseError("no records in input")
        return ExplicitOrder(tuple(ids))

    scores = {}
    if fmt == "csv":
        for line, (item_id, score) in _csv_records(text, ("id", "score")):
            item_id = item_id.strip()
            _claim(seen, item_id, line)
            scores[item_id] = _parse_score(score, line)
    else:
        for line, record in _json_records(text):
            item_id = _json_id(record, line)
            score = record.get("score")
            if not isinstance(score, (int, float)):
                raise ParseError(f"field 'score' must be a number, got {score!r}", line)
            _claim(seen, item_id, line)
            scores[item_id] = _parse_score(score, line)
    if not scores:
        raise ParseError("no records in input")
    return ScoreAssignment(scores)


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _jsonl_text(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def write_reference(ranked: RankedList, fmt: str = "csv") -> str:
    _check_format(fmt)
    if fmt == "csv":
        return _csv_text(("id", "rank"), ((it.id, it.rank) for it in ranked))
    return _jsonl_text({"id": it.id, "rank": it.rank} for it in ranked)


def write_hypothesis(hyp: Hypothesis, fmt: str = "csv") -> str:
    """Serialize a hypothesis; orders use one-id-per-line, scores use ``id,score``."""
    _check_format(fmt)
    if isinstance(hyp, ExplicitOrder):
        if fmt == "csv":
            return "".join(i + "\n" for i in hyp.ids)
        return _jsonl_text({"id": i} for i in hyp.ids)
    if fmt == "csv":
        return _csv_text(("id", "score"), ((i, repr(s)) for i, s in hyp.scores.items()))
    return _jsonl_text({"id": i, "score": s} for i, s in hyp.scores.items())


def hypothesis_mode(hyp: Hypothesis) -> str:
    return "order" if isinstance(hyp, ExplicitOrder) else "scores"


@dataclass
class ReportRow:
    """One evaluated hypothesis: metric name -> value (or Undefined)."""

    name: str
    scores: dict[str, MetricValue] = field(default_factory=dict)


def format_value(value: MetricValue, places: int = 3) -> str:
    """Round half-to-even for display, e.g. ``0.650 -> '0.65'``, ``1 -> '1.0'``."""
    if isinstance(value, Undefined):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    q = Decimal(repr(float(value))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)
    text = format(q, "f").rstrip("0")
    if text.endswith("."):
        text += "0"
    return "0.0" if text == "-0.0" else text


def _machine_value(value: MetricValue):
    return None if isinstance(value, Undefined) else float(value)


def _metric_columns(rows: Sequence[ReportRow]) -> list[str]:
    return list(dict.fromkeys(m for row in rows for m in row.scores))


def write_report(rows: Sequence[ReportRow], fmt: str = "table") -> str:
    if fmt not in REPORT_FORMATS:
        raise InvalidInput(f"unknown report format {fmt!r}; choose from {', '.join(REPORT_FORMATS)}")
    if not rows:
        raise InvalidInput("empty report")
    metrics = _metric_columns(rows)
    if fmt == "json":
        doc = {"rows": [{"name": r.name,
                         "scores": {m: _machine_value(r.scores[m]) for m in metrics if m in r.scores}}
                        for r in rows]}
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        body = []
        for r in rows:
            cells = []
            for m in metrics:
                v = r.scores.get(m)
                cells.append("" if v is None or isinstance(v, Undefined) else repr(float(v)))
            body.append([r.name, *cells])
        return _csv_text(["name", *metrics], body)

    table = [["name", *metrics]]
    for r in rows:
        table.append([r.name, *(format_value(r.scores[m]) if m in r.scores else "" for m in metrics)])
    widths = [max(len(row[c]) for row in table) for c in range(len(table[0]))]
    lines = []
    for k, row in enumerate(table):
        cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_sweep_csv(rows: Iterable) -> str:
    """``step,metric,score`` with an empty score for undefined values."""
    return _csv_text(("step", "metric", "score"),
                     ((r.step, r.metric, "" if isinstance(r.score, Undefined) else repr(float(r.score)))
                      for r in rows))


def write_curves_csv(curves: dict[str, Sequence[tuple[int, float]]]) -> str:
    return _csv_text(("position", "variant", "cost"),
                     ((pos, variant, repr(float(cost)))
                      for variant, curve in curves.items() for pos, cost in curve))
