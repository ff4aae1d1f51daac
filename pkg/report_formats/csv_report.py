# report_formats/csv_report.py
"""
CSV reports: one long table with a `section` column.

Metadata rows carry a field name in `key` and its JSON encoding in `json`.
Reals are written with 17 significant digits, so a report parses back into
exactly the same values.
"""

import io
import json
from typing import Dict, List

import pandas as pd
from pydantic import ValidationError

from softval.errors import ParseError
from softval.report_models import SECTION_MODELS, EvaluationReport, ReportMeta

META_SECTION = "meta"


def _columns() -> List[str]:
    columns = ["section", "key", "json"]
    for model in SECTION_MODELS.values():
        for name in model.model_fields:
            if name not in columns:
                columns.append(name)
    return columns


COLUMNS = _columns()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render_csv(report: EvaluationReport) -> str:
    rows: List[Dict[str, str]] = []
    for key, value in report.meta.model_dump(mode="json").items():
        rows.append({"section": META_SECTION, "key": key, "json": json.dumps(value)})
    for section in SECTION_MODELS:
        for row in getattr(report, section):
            cells = {name: _cell(value) for name, value in row.model_dump(mode="json").items()}
            cells["section"] = section
            rows.append(cells)
    frame = pd.DataFrame(rows, columns=COLUMNS).fillna("")
    return frame.to_csv(index=False, lineterminator="\n")


def parse_csv(text: str) -> EvaluationReport:
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(f"Unreadable CSV report: {e}")
    if "section" not in frame.columns:
        raise ParseError("A CSV report needs a 'section' column.")

    meta = {}
    sections: Dict[str, list] = {name: [] for name in SECTION_MODELS}
    try:
        for line, record in enumerate(frame.to_dict(orient="records"), start=2):
            section = record["section"]
            if section == META_SECTION:
                meta[record["key"]] = json.loads(record["json"])
            elif section in SECTION_MODELS:
                fields = SECTION_MODELS[section].model_fields
                values = {name: (record.get(name, "") or None) for name in fields}
                sections[section].append(SECTION_MODELS[section].model_validate(values))
            else:
                raise ParseError(f"Unknown report section '{section}'.", line=line, column="section")
        return EvaluationReport(meta=ReportMeta.model_validate(meta), **sections)
    except (ValidationError, json.JSONDecodeError) as e:
        raise ParseError(f"Not an evaluation report: {e}")
