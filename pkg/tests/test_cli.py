# tests/test_cli.py
import json
import logging
from pathlib import Path

import pytest

from softval_cli import main

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(autouse=True)
def reset_logging():
    """main() points the root logger at the captured stderr of one test; detach it afterwards."""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if type(handler) is logging.StreamHandler:
            root.removeHandler(handler)


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_to_stdout(capsys, two_sample_csv):
    code, out, err = _run(capsys, "eval", "--ref-pred", str(two_sample_csv))
    assert code == 0
    report = json.loads(out)
    assert report["meta"]["source"] == "two_samples.csv"
    assert len(report["results"]) == 24
    assert "[CLI]" in err


def test_output_is_byte_identical_across_runs_and_workers(capsys, grouped_csv, tmp_path):
    args = ["eval", "--ref-pred", str(grouped_csv), "--group-by", "iteration,fold", "--regression", "mae,rmse",
            "--harden", "wta", "--confusion", "--interclass", "--curves", "--curve-grid", "11",
            "--out-format", "csv"]
    outputs = []
    for workers in ("1", "1", "4"):
        target = tmp_path / f"report_{len(outputs)}.csv"
        code, _, _ = _run(capsys, *args, "--workers", workers, "--out", str(target))
        assert code == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_table_output(capsys, two_sample_csv):
    code, out, _ = _run(capsys, "eval", "--ref-pred", str(two_sample_csv), "--out-format", "table",
                        "--measures", "sens", "--operators", "product")
    assert code == 0
    assert "[results]" in out
    assert "0.733" in out


@pytest.mark.parametrize("content", [
    "sample,ref:A,ref:B,pred:A,pred:B\ns1,1,0,0.7,0.2\n",
    "sample,ref:A,ref:B,pred:A,pred:B\ns1,1,0,x,0.3\n",
    "sample,ref:A,pred:B\ns1,1,1\n",
])
def test_input_errors_exit_2(capsys, tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content, encoding="utf-8")
    code, out, err = _run(capsys, "eval", "--ref-pred", str(path))
    assert code == 2
    assert out == ""
    assert "ERROR" in err


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = _run(capsys, "eval", "--ref-pred", str(tmp_path / "absent.csv"))
    assert code == 2
    assert "FileNotFoundError" in err


def test_invalid_option_exit_2(capsys, two_sample_csv):
    code, _, _ = _run(capsys, "eval", "--ref-pred", str(two_sample_csv), "--operators", "median")
    assert code == 2
    code, _, _ = _run(capsys, "eval", "--ref-pred", str(two_sample_csv), "--harden", "threshold=7")
    assert code == 2


def test_computation_error_exit_3(capsys, two_sample_csv):
    code, out, err = _run(capsys, "eval", "--ref-pred", str(two_sample_csv), "--curves")
    assert code == 3
    assert out == ""
    assert "SoftReferenceError" in err


def test_exclude_soft_curves(capsys, two_sample_csv):
    code, out, _ = _run(capsys, "eval", "--ref-pred", str(two_sample_csv), "--curves", "--exclude-soft")
    assert code == 0
    assert json.loads(out)["curves"]


def test_variance_with_one_group_exit_3(capsys, two_sample_csv):
    code, _, err = _run(capsys, "eval", "--ref-pred", str(two_sample_csv), "--variance")
    assert code == 3
    assert "TooFewGroups" in err


def test_unwritable_out_exit_2(capsys, two_sample_csv, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("x")
    code, _, _ = _run(capsys, "eval", "--ref-pred", str(two_sample_csv), "--out", str(blocker / "r.json"))
    assert code == 2


def test_open_world_and_classes(capsys, tmp_path):
    path = tmp_path / "open.json"
    path.write_text(json.dumps([
        {"sample": "a", "ref:X": 1, "ref:Y": 1, "pred:X": 0.9, "pred:Y": 0.4},
        {"sample": "b", "ref:X": 0, "ref:Y": 1, "pred:X": 0.2, "pred:Y": 0.7},
    ]), encoding="utf-8")
    code, out, _ = _run(capsys, "eval", "--ref-pred", str(path), "--world", "open", "--classes", "Y",
                        "--interclass")
    assert code == 0
    report = json.loads(out)
    assert report["meta"]["world"] == "open"
    assert {row["class_name"] for row in report["results"]} == {"Y"}
    assert report["interclass"][0]["bound"] == 2.0


def test_unknown_class_exit_2(capsys, two_sample_csv):
    code, _, err = _run(capsys, "eval", "--ref-pred", str(two_sample_csv), "--classes", "Z")
    assert code == 2
    assert "UnknownClass" in err


def test_empty_measures_give_metadata_only(capsys, two_sample_csv):
    code, out, _ = _run(capsys, "eval", "--ref-pred", str(two_sample_csv), "--measures", "")
    assert code == 0
    report = json.loads(out)
    assert report["results"] == []
    assert report["meta"]["n_samples"] == 2


def test_golden_report(capsys, tmp_path, monkeypatch):
    for name in ("SOFTVAL_TOL_SUM", "SOFTVAL_TOL_CLAMP", "SOFTVAL_WORKERS"):
        monkeypatch.delenv(name, raising=False)
    outputs = []
    for workers in ("1", "1", "4"):
        target = tmp_path / f"golden_{len(outputs)}.json"
        code, _, _ = _run(capsys, "eval", "--ref-pred", str(DATA_DIR / "golden_input.csv"), "--group-by", "fold",
                          "--measures", "sens", "--operators", "product,weak", "--classes", "A",
                          "--workers", workers, "--out", str(target))
        assert code == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    expected = json.loads((DATA_DIR / "golden_report.json").read_text(encoding="utf-8"))
    assert json.loads(outputs[0]) == expected
