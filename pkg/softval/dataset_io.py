# softval/dataset_io.py
"""
Reading reference/prediction tables.

A dataset is a table with one row per sample: an id column, optional group
columns (iteration, fold, patient, ...), one `ref:<class>` and one
`pred:<class>` column per class. CSV (header mandatory) and JSON (a list of
records) are supported.
"""

import hashlib
import io
import json
import logging
import os
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from softval.curves_aggregation import GroupedPredictions
from softval.errors import ParseError, SchemaError, SoftValError, annotate
from softval.membership import Tolerances, World, validate
from softval.numerics import group_sort_key

logger = logging.getLogger(__name__)

REF_PREFIX = "ref:"
PRED_PREFIX = "pred:"
DEFAULT_ID_COLUMN = "sample"
SUPPORTED_FORMATS = ("csv", "json")


def file_digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def infer_format(path: Union[str, os.PathLike]) -> str:
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix not in SUPPORTED_FORMATS:
        raise SchemaError(f"Cannot infer the format of '{path}'; use --format csv|json.")
    return suffix


def read_frame(data: bytes, fmt: str) -> pd.DataFrame:
    """Parse raw bytes into a DataFrame of untyped cells."""
    if fmt == "csv":
        try:
            return pd.read_csv(io.BytesIO(data), dtype=str, keep_default_na=False, encoding="utf-8")
        except pd.errors.EmptyDataError:
            raise SchemaError("The CSV file is empty; a header row is required.")
        except (pd.errors.ParserError, UnicodeDecodeError) as e:
            raise ParseError(f"Unreadable CSV: {e}")
    if fmt == "json":
        try:
            records = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            line = getattr(e, "lineno", None)
            raise ParseError(f"Unreadable JSON: {e}", line=line)
        if not isinstance(records, list) or not all(isinstance(r, dict) for r in records):
            raise SchemaError("A JSON dataset must be a list of records (objects).")
        return pd.DataFrame.from_records(records)
    raise SchemaError(f"Unsupported dataset format '{fmt}'. Use one of {list(SUPPORTED_FORMATS)}.")


def _class_columns(columns: Sequence[str]) -> Tuple[List[str], Dict[str, str], Dict[str, str]]:
    ref = {c[len(REF_PREFIX):]: c for c in columns if c.startswith(REF_PREFIX)}
    pred = {c[len(PRED_PREFIX):]: c for c in columns if c.startswith(PRED_PREFIX)}
    if not ref or not pred:
        raise SchemaError(f"Missing '{REF_PREFIX}<class>' or '{PRED_PREFIX}<class>' columns in {list(columns)}.")
    if set(ref) != set(pred):
        raise SchemaError(f"Reference classes {sorted(ref)} and prediction classes {sorted(pred)} differ.")
    # class order follows the reference columns in the header
    classes = list(ref)
    return classes, ref, pred


def _numeric(frame: pd.DataFrame, column: str, fmt: str) -> np.ndarray:
    raw = frame[column]
    values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if np.any(bad):
        row = int(np.flatnonzero(bad)[0])
        # header is line 1 in CSV, records count from 1 in JSON
        line = row + 2 if fmt == "csv" else row + 1
        raise ParseError(f"Cell {raw.iloc[row]!r} is not a finite number.", line=line, column=column)
    return values


def parse_dataset(frame: pd.DataFrame,
                  fmt: str = "csv",
                  world: World = World.CLOSED,
                  tolerances: Tolerances = Tolerances(),
                  group_by: Sequence[str] = (),
                  id_column: str = DEFAULT_ID_COLUMN) -> GroupedPredictions:
    """Turn a parsed table into validated, grouped membership matrices."""
    columns = [str(c) for c in frame.columns]
    frame.columns = columns
    if id_column not in columns:
        raise SchemaError(f"Missing sample id column '{id_column}'.")
    missing = [c for c in group_by if c not in columns]
    if missing:
        raise SchemaError(f"Group column(s) {missing} not found.")
    if frame.empty:
        raise SchemaError("The dataset has no rows.")
    classes, ref_columns, pred_columns = _class_columns(columns)

    known = {id_column, *group_by, *ref_columns.values(), *pred_columns.values()}
    ignored = [c for c in columns if c not in known]
    if ignored:
        logger.warning(f"Ignoring column(s) {ignored}.")

    ref_values = np.column_stack([_numeric(frame, ref_columns[c], fmt) for c in classes])
    pred_values = np.column_stack([_numeric(frame, pred_columns[c], fmt) for c in classes])
    sample_ids = frame[id_column].astype(str).tolist()

    if group_by:
        keys = [tuple(str(v) for v in row) for row in frame[list(group_by)].itertuples(index=False)]
    else:
        keys = [()] * len(frame)

    rows_by_key: Dict[Tuple[str, ...], List[int]] = {}
    for row, key in enumerate(keys):
        rows_by_key.setdefault(key, []).append(row)

    groups = {}
    for key in sorted(rows_by_key, key=group_sort_key):
        rows = rows_by_key[key]
        ids = [sample_ids[k] for k in rows]
        try:
            ref = validate(ref_values[rows], classes, world, tolerances, ids)
            pred = validate(pred_values[rows], classes, world, tolerances, ids)
        except SoftValError as e:
            if key:
                annotate(e, ",".join(f"{n}={v}" for n, v in zip(group_by, key)))
            raise
        groups[key] = (ref, pred)

    return GroupedPredictions(groups, key_names=tuple(group_by))


def load_dataset(path: Union[str, os.PathLike],
                 fmt: Optional[str] = None,
                 world: World = World.CLOSED,
                 tolerances: Tolerances = Tolerances(),
                 group_by: Sequence[str] = (),
                 id_column: str = DEFAULT_ID_COLUMN) -> Tuple[GroupedPredictions, str]:
    """
    Read and validate a dataset file.

    Args:
        path: CSV or JSON file.
        fmt: "csv" or "json"; inferred from the file suffix when None.
        world: Closed or open world validation.
        tolerances: Clamp and row-sum tolerances.
        group_by: Columns whose values define the groups.
        id_column: Column holding the sample identifiers.

    Returns:
        (grouped predictions, sha256 digest of the file)
    """
    fmt = fmt or infer_format(path)
    data = Path(path).read_bytes()
    gp = parse_dataset(read_frame(data, fmt), fmt, world, tolerances, group_by, id_column)
    logger.info(f"Loaded {gp.n_samples} samples in {len(gp)} group(s), classes {list(gp.class_names)} "
                f"from {path}")
    return gp, file_digest(data)


def load_dataset_bytes(data: bytes, fmt: str, world: World = World.CLOSED,
                       tolerances: Tolerances = Tolerances(), group_by: Sequence[str] = (),
                       id_column: str = DEFAULT_ID_COLUMN) -> Tuple[GroupedPredictions, str]:
    """Same as load_dataset for content that is already in memory (uploads)."""
    gp = parse_dataset(read_frame(data, fmt), fmt, world, tolerances, group_by, id_column)
    return gp, file_digest(data)
