# report_formats/__init__.py
"""Serialized forms of an evaluation report."""

from report_formats.csv_report import parse_csv, render_csv
from report_formats.json_report import parse_json, render_json
from report_formats.table_report import render_table
from softval.errors import SchemaError

RENDERERS = {
    "json": render_json,
    "csv": render_csv,
    "table": render_table,
}

PARSERS = {
    "json": parse_json,
    "csv": parse_csv,
}

MEDIA_TYPES = {
    "json": "application/json",
    "csv": "text/csv",
    "table": "text/plain",
}


def emit_report(report, fmt: str = "json") -> str:
    """Serialize a report as json, csv or a text table."""
    if fmt not in RENDERERS:
        raise SchemaError(f"Unknown report format '{fmt}'. Use one of {list(RENDERERS)}.")
    return RENDERERS[fmt](report)


def read_report(text: str, fmt: str = "json"):
    """Parse a json or csv report back into an EvaluationReport."""
    if fmt not in PARSERS:
        raise SchemaError(f"Reports can be read from {list(PARSERS)}, not '{fmt}'.")
    return PARSERS[fmt](text)
