# tests/test_rest_api.py
import json

import pytest
from fastapi.testclient import TestClient

from rest_api_server import app

TWO_SAMPLES = b"sample,ref:A,ref:B,pred:A,pred:B\ns1,1,0,0.8,0.2\ns2,0.5,0.5,0.6,0.4\n"


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def _upload(content=TWO_SAMPLES, name="two.csv"):
    return {"dataset": (name, content, "text/csv")}


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["tool"] == "softval"


def test_info(client):
    info = client.get("/info").json()
    assert list(info["operators"]) == ["strong", "product", "weak"]
    assert set(info["measures"]) == {"sens", "spec", "ppv", "npv"}
    assert info["report_formats"] == ["json", "csv", "table"]


def test_evaluate_json(client):
    response = client.post("/evaluate", files=_upload(), data={"measures": "sens", "operators": "product"})
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("application/json")
    report = response.json()
    assert report["meta"]["source"] == "two.csv"
    values = {row["class_name"]: row["value"] for row in report["results"]}
    assert values["A"] == pytest.approx(1.1 / 1.5)


def test_evaluate_csv_output(client):
    response = client.post("/evaluate", files=_upload(), data={"out_format": "csv", "confusion": "true"})
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/csv")
    assert response.text.startswith("section,key,json")


def test_json_dataset_format_from_name(client):
    records = [{"sample": "s1", "ref:A": 1, "ref:B": 0, "pred:A": 0.7, "pred:B": 0.3}]
    response = client.post("/evaluate", files=_upload(json.dumps(records).encode(), "data.json"))
    assert response.status_code == 200


def test_input_error_is_400(client):
    bad = b"sample,ref:A,ref:B,pred:A,pred:B\ns1,1,0,0.7,0.2\n"
    response = client.post("/evaluate", files=_upload(bad))
    assert response.status_code == 400
    assert "RowSumViolation" in response.json()["detail"]


def test_invalid_option_is_400(client):
    response = client.post("/evaluate", files=_upload(), data={"operators": "median"})
    assert response.status_code == 400
    response = client.post("/evaluate", files=_upload(), data={"out_format": "xml"})
    assert response.status_code == 400


def test_computation_error_is_422(client):
    response = client.post("/evaluate", files=_upload(), data={"curves": "true"})
    assert response.status_code == 422
    assert "SoftReferenceError" in response.json()["detail"]
