import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankeval.baselines import Undefined
from rankeval.core import ExplicitOrder, ParseError, RankedList, ScoreAssignment
from rankeval.io import (
    ReportRow,
    format_value,
    parse_hypothesis,
    parse_reference,
    write_curves_csv,
    write_hypothesis,
    write_reference,
    write_report,
    write_sweep_csv,
)


def test_parse_reference_csv():
    ranked = parse_reference(io.StringIO("id,rank\na,9\nb,4\n"))
    assert ranked == RankedList.from_mapping({"a": 9, "b": 4})


def test_parse_reference_crlf_and_bom(tmp_path):
    path = tmp_path / "ref.csv"
    path.write_bytes("﻿id,rank\r\na,9\r\nb,4\r\n".encode("utf-8"))
    assert parse_reference(path).ranks == (9, 4)


def test_parse_reference_jsonl():
    ranked = parse_reference(io.StringIO('{"id":"u1","rank":3}\n\n{"id":"u2","rank":0}\n'), "jsonl")
    assert ranked.items[0].id == "u1" and ranked.items[0].rank == 3
    assert ranked.ranks == (3, 0)


@pytest.mark.parametrize("text, line", [
    ("id,rank\na,9\na,4\n", 3),
    ("id,rank\na,-1\n", 2),
    ("id,rank\na,1.5\n", 2),
    ("id,rank\na,x\n", 2),
    ("id,rank\na\n", 2),
    ("name,value\na,1\n", 1),
])
def test_parse_reference_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_reference(io.StringIO(text))
    assert info.value.line == line


@pytest.mark.parametrize("text", ["", "id,rank\n", "\n\n"])
def test_parse_reference_empty(text):
    with pytest.raises(ParseError):
        parse_reference(io.StringIO(text))


@pytest.mark.parametrize("text, line", [
    ('{"id":"a","rank":1}\n{"id":"a","rank":2}\n', 2),
    ('{"id":"a","rank":true}\n', 1),
    ('{"id":"a","rank":1.0}\n', 1),
    ('{"id":5,"rank":1}\n', 1),
    ('[1, 2]\n', 1),
    ('{"id":"a",\n', 1),
])
def test_parse_reference_jsonl_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_reference(io.StringIO(text), "jsonl")
    assert info.value.line == line


def test_parse_hypothesis_order():
    assert parse_hypothesis(io.StringIO("b\nc\na\n")) == ExplicitOrder(("b", "c", "a"))
    hyp = parse_hypothesis(io.StringIO('{"id":"b"}\n{"id":"a"}\n'), "jsonl", "order")
    assert hyp == ExplicitOrder(("b", "a"))


def test_parse_hypothesis_scores_keeps_ties():
    hyp = parse_hypothesis(io.StringIO("id,score\na,0.5\nb,0.5\n"), mode="scores")
    assert hyp == ScoreAssignment({"a": 0.5, "b": 0.5})
    hyp = parse_hypothesis(io.StringIO('{"id":"a","score":2}\n'), "jsonl", "scores")
    assert hyp.scores == {"a": 2.0}


@pytest.mark.parametrize("text, line", [
    ("id,score\na,abc\n", 2),
    ("id,score\na,inf\n", 2),
    ("id,score\na,1\na,2\n", 3),
])
def test_parse_hypothesis_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_hypothesis(io.StringIO(text), mode="scores")
    assert info.value.line == line


def test_parse_hypothesis_unknown_ids_pass_through():
    assert parse_hypothesis(io.StringIO("zzz\n")).ids == ("zzz",)


def test_order_duplicate_id_is_parse_error():
    with pytest.raises(ParseError) as info:
        parse_hypothesis(io.StringIO("a\nb\na\n"))
    assert info.value.line == 3


ids = st.text(alphabet=st.characters(min_codepoint=32, max_codepoint=0x2FF), min_size=1,
              max_size=6).filter(lambda s: s == s.strip())


@given(st.dictionaries(ids, st.integers(0, 10**6), min_size=1, max_size=20),
       st.sampled_from(["csv", "jsonl"]))
def test_reference_round_trip(mapping, fmt):
    ranked = RankedList.from_mapping(mapping)
    assert parse_reference(io.StringIO(write_reference(ranked, fmt)), fmt) == ranked


@given(st.dictionaries(ids, st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20),
       st.sampled_from(["csv", "jsonl"]))
def test_scores_round_trip(mapping, fmt):
    hyp = ScoreAssignment(mapping)
    assert parse_hypothesis(io.StringIO(write_hypothesis(hyp, fmt)), fmt, "scores") == hyp


@given(st.lists(ids, min_size=1, max_size=20, unique=True), st.sampled_from(["csv", "jsonl"]))
def test_order_round_trip(order, fmt):
    hyp = ExplicitOrder(tuple(order))
    assert parse_hypothesis(io.StringIO(write_hypothesis(hyp, fmt)), fmt, "order") == hyp


@pytest.mark.parametrize("value, text", [
    (1.0, "1.0"), (0.65, "0.65"), (0.975, "0.975"), (0.0, "0.0"), (-0.8, "-0.8"),
    (0.0125, "0.012"), (0.0135, "0.014"), (0.7428571428571429, "0.743"), (-0.0001, "0.0"),
    (Undefined("constant"), "nan"),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_table_report():
    rows = [ReportRow("row1", {"rankdcg": 1.0, "tau-b": Undefined("constant")}),
            ReportRow("row2", {"rankdcg": 0.6500000000000002, "tau-b": 0.742857})]
    text = write_report(rows)
    lines = text.splitlines()
    assert lines[0].split() == ["name", "rankdcg", "tau-b"]
    assert lines[2].split() == ["row1", "1.0", "nan"]
    assert lines[3].split() == ["row2", "0.65", "0.743"]
    assert write_report([ReportRow("only", {"rankdcg": 0.5})]).splitlines()[2].split() == ["only", "0.5"]


def test_machine_reports_keep_precision():
    rows = [ReportRow("h", {"rankdcg": 0.6500000000000002, "tau-b": Undefined("constant")})]
    doc = json.loads(write_report(rows, "json"))
    assert doc == {"rows": [{"name": "h", "scores": {"rankdcg": 0.6500000000000002, "tau-b": None}}]}
    assert write_report(rows, "csv") == "name,rankdcg,tau-b\nh,0.6500000000000002,\n"


def test_sweep_and_curve_csv():
    from rankeval.datagen import SweepRow
    text = write_sweep_csv([SweepRow(0, "rankdcg", 1.0), SweepRow(1, "tau-b", Undefined("x"))])
    assert text == "step,metric,score\n0,rankdcg,1.0\n1,tau-b,\n"
    assert write_curves_csv({"rankdcg": [(1, 4.0), (2, 1.5)]}) == \
        "position,variant,cost\n1,rankdcg,4.0\n2,rankdcg,1.5\n"
