# report_formats/table_report.py
"""Plain text tables for reading a report on the terminal (reals with 3 decimals)."""

from typing import List

import pandas as pd

from softval.report_models import SECTION_MODELS, EvaluationReport

UNDEFINED = "undefined"


def _cell(value) -> str:
    if value is None:
        return UNDEFINED
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def render_table(report: EvaluationReport) -> str:
    meta = report.meta
    lines: List[str] = [
        f"{meta.tool} {meta.version}",
        f"source:     {meta.source}",
        f"digest:     {meta.dataset_digest}",
        f"world:      {meta.world.value}",
        f"operators:  {', '.join(meta.operators) or '-'}",
        f"measures:   {', '.join(meta.measures) or '-'}",
        f"regression: {', '.join(meta.regression) or '-'}",
        f"hardening:  {meta.hardening or '-'}",
        f"tolerances: clamp={meta.tolerances.clamp!r} row_sum={meta.tolerances.row_sum!r}",
        f"samples:    {meta.n_samples} in {meta.n_groups} group(s)"
        + (f" by {', '.join(meta.group_columns)}" if meta.group_columns else ""),
        "classes:    " + ", ".join(f"{name} ({_cell(share)})" for name, share in meta.class_proportions.items()),
    ]
    for section, model in SECTION_MODELS.items():
        rows = getattr(report, section)
        if not rows:
            continue
        columns = [name for name in model.model_fields if name not in ("defined",)]
        frame = pd.DataFrame([{name: _cell(getattr(row, name)) for name in columns} for row in rows],
                             columns=columns)
        lines.append("")
        lines.append(f"[{section}]")
        lines.append(frame.to_string(index=False))
    return "\n".join(lines) + "\n"
