# tests/test_config.py
import pytest
from pydantic import ValidationError

from config.softval_config import (
    ENV_TOL_CLAMP,
    ENV_TOL_SUM,
    ENV_WORKERS,
    get_measure_info,
    get_operator_info,
    get_operators_in_order,
    get_tolerances,
    get_workers,
)
from softval.errors import (
    EXIT_COMPUTATION_ERROR,
    EXIT_INPUT_ERROR,
    ParseError,
    TieError,
    annotate,
    exit_code_for,
)
from softval.membership import AndOperator, HardeningKind
from softval.report_models import EvaluationConfig


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in (ENV_TOL_SUM, ENV_TOL_CLAMP, ENV_WORKERS):
        monkeypatch.delenv(name, raising=False)


def test_default_tolerances():
    tolerances = get_tolerances()
    assert tolerances.row_sum == 1e-6
    assert tolerances.clamp == 1e-9


def test_tolerances_from_env(monkeypatch):
    monkeypatch.setenv(ENV_TOL_SUM, "1e-3")
    assert get_tolerances().row_sum == 1e-3


def test_invalid_env_falls_back(monkeypatch, caplog):
    monkeypatch.setenv(ENV_WORKERS, "many")
    monkeypatch.setenv(ENV_TOL_CLAMP, "-1")
    assert get_workers() == 1
    assert get_tolerances().clamp == 1e-9
    assert "SOFTVAL_WORKERS" in caplog.text


def test_operator_catalog():
    assert get_operators_in_order() == ["strong", "product", "weak"]
    assert get_operator_info("weak")["formula"] == "min(r, p)"
    assert get_operator_info("median") == {}
    assert get_measure_info("ppv")["name"] == "Positive predictive value"


def test_evaluation_config_defaults():
    config = EvaluationConfig()
    assert config.operators == [AndOperator.STRONG, AndOperator.PRODUCT, AndOperator.WEAK]
    assert config.hardening_rule() is None
    assert config.curve_grid == 101
    assert EvaluationConfig(hardening="threshold=0.3").hardening_rule().kind is HardeningKind.THRESHOLD


@pytest.mark.parametrize("fields", [
    {"operators": ["median"]},
    {"hardening": "argmax"},
    {"curve_grid": 1},
    {"workers": 0},
    {"world": "half-open"},
])
def test_evaluation_config_rejects(fields):
    with pytest.raises(ValidationError):
        EvaluationConfig(**fields)


def test_exit_codes():
    assert exit_code_for(ParseError("x")) == EXIT_INPUT_ERROR
    assert exit_code_for(TieError("x")) == EXIT_COMPUTATION_ERROR
    assert exit_code_for(FileNotFoundError("x")) == EXIT_INPUT_ERROR
    assert exit_code_for(RuntimeError("x")) == EXIT_COMPUTATION_ERROR


def test_annotate_keeps_type_and_attributes():
    error = annotate(ParseError("bad cell", line=4, column="pred:A"), "fold=2")
    assert isinstance(error, ParseError)
    assert str(error) == "[fold=2] bad cell"
    assert error.line == 4
