# report_formats/json_report.py
"""JSON reports: floats are written with the shortest repr that reads back bit-exactly."""

import json

from pydantic import ValidationError

from softval.errors import ParseError
from softval.report_models import EvaluationReport


def render_json(report: EvaluationReport) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, allow_nan=False) + "\n"


def parse_json(text: str) -> EvaluationReport:
    try:
        return EvaluationReport.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise ParseError(f"Unreadable JSON report: {e}", line=e.lineno)
    except ValidationError as e:
        raise ParseError(f"Not an evaluation report: {e}")
