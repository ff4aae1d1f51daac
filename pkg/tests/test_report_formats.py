# tests/test_report_formats.py
import json

import pytest

from api.softval_api import run_evaluation
from report_formats import emit_report, read_report
from report_formats.csv_report import COLUMNS
from softval.curves_aggregation import GroupedPredictions
from softval.errors import ParseError, SchemaError
from softval.membership import validate
from softval.report_models import EvaluationConfig
from softval.synthetic import replicate_groups

FULL_REQUEST = dict(regression=["mae", "rmse"], hardening="wta", curves=True, curve_grid=5,
                    confusion=True, ideal=True, interclass=True, variance=True)


@pytest.fixture(scope="module")
def full_report():
    gp = replicate_groups(3, 30, n_classes=3, seed=42)
    return run_evaluation(gp, EvaluationConfig(**FULL_REQUEST), digest="sha256:0", source="synthetic")


def test_json_round_trip(full_report):
    text = emit_report(full_report, "json")
    assert read_report(text, "json") == full_report
    assert emit_report(read_report(text, "json"), "json") == text


def test_json_to_csv_to_json_is_exact(full_report):
    json_text = emit_report(full_report, "json")
    csv_text = emit_report(read_report(json_text, "json"), "csv")
    assert emit_report(read_report(csv_text, "csv"), "json") == json_text


def test_csv_layout(full_report):
    text = emit_report(full_report, "csv")
    lines = text.splitlines()
    assert lines[0] == ",".join(COLUMNS)
    assert lines[1].startswith("meta,tool,")
    sections = {line.split(",", 1)[0] for line in lines[1:]}
    assert {"meta", "results", "statistics", "curves", "curve_bands", "confusion",
            "bounds", "interclass", "variance"} <= sections
    assert "\r" not in text


def test_json_has_no_nan(full_report):
    data = json.loads(emit_report(full_report, "json"))
    assert data["meta"]["world"] == "closed"
    assert "NaN" not in emit_report(full_report, "json")


def test_table_for_single_sample(single_sample):
    report = run_evaluation(GroupedPredictions({(): single_sample}),
                            EvaluationConfig(confusion=True, measures=["sens"]))
    text = emit_report(report, "table")
    assert "[confusion]" in text
    assert "[results]" in text
    for value in ("0.300", "0.400", "0.500"):
        assert value in text
    assert text.startswith("softval ")


def test_table_marks_undefined():
    ref = validate([[1, 0]], ("A", "B"))
    pred = validate([[0.6, 0.4]], ("A", "B"))
    text = emit_report(run_evaluation(GroupedPredictions({(): (ref, pred)})), "table")
    assert "undefined" in text


def test_unknown_formats(full_report):
    with pytest.raises(SchemaError):
        emit_report(full_report, "xml")
    with pytest.raises(SchemaError):
        read_report("", "table")


def test_garbage_reports():
    with pytest.raises(ParseError):
        read_report("{not json", "json")
    with pytest.raises(ParseError):
        read_report('{"meta": {}}', "json")
    with pytest.raises(ParseError):
        read_report("a,b\n1,2\n", "csv")
