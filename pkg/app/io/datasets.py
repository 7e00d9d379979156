"""
CSV ingestion and emission of incomplete repeated-measures datasets.

Two layouts are read:
    WIDE: one row per subject, one column per occasion
    LONG: one row per (subject, occasion) with an occasion number and a value

Every cell is read as text; the missing token applies to value fields
only, so a group called "NA" stays a group. Reported row numbers are
1-based file lines (the header is line 1).
"""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from ..core.config import settings
from ..models.dataset import IncompleteDataset
from ..models.simulation import SimulationConfig
from ..services.mc_harness import load_config
from ..utils.errors import ConfigError, ParseError, SchemaError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class TableFormat(str, Enum):
    WIDE = "WIDE"
    LONG = "LONG"


class TableSchema(BaseModel):
    """Column layout of an input table"""
    format: TableFormat = TableFormat.WIDE
    group_column: str = "group"
    subject_column: str = "subject"
    occasion_columns: Optional[List[str]] = None
    occasion_column: str = "occasion"
    value_column: str = "value"
    missing_token: str = Field(default_factory=lambda: settings.missing_token)


def _read_frame(path: PathLike) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as e:
        raise SchemaError(f"cannot read {path}: file not found") from e
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e.strerror or e}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot parse {path}: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def _require(frame: pd.DataFrame, columns: List[str]):
    for column in columns:
        if column not in frame.columns:
            raise SchemaError(f"column '{column}' not found (have {list(frame.columns)})", column=column)


def _to_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return np.nan


def _parse_values(
    column: pd.Series,
    name: str,
    token: str,
    header_lines: int = 1
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Floats and observation flags of a value column.

    Cells are converted with float(); distinct decimal texts of distinct
    doubles stay distinct.
    """
    raw = column.str.strip()
    missing = (raw == token).to_numpy()
    numbers = np.array([np.nan if skip else _to_float(text) for text, skip in zip(raw, missing)], dtype=float)
    bad = ~missing & ~np.isfinite(numbers)
    if bad.any():
        position = int(np.flatnonzero(bad)[0])
        row = int(column.index[position]) + header_lines + 1
        raise ParseError(
            f"row {row}, column '{name}': cannot parse '{raw.iloc[position]}' as a number",
            row=row, column=name
        )
    return np.where(missing, 0.0, numbers), ~missing


def _parse_occasions(column: pd.Series, name: str) -> np.ndarray:
    raw = column.str.strip()
    numbers = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(numbers) | (numbers != np.round(numbers))
    if bad.any():
        position = int(np.flatnonzero(bad)[0])
        row = int(column.index[position]) + 2
        raise ParseError(
            f"row {row}, column '{name}': occasion '{raw.iloc[position]}' is not an integer",
            row=row, column=name
        )
    return numbers.astype(int)


def _group_order(frame: pd.DataFrame, schema: TableSchema) -> List[str]:
    return list(dict.fromkeys(frame[schema.group_column].str.strip()))


def _wide_dataset(frame: pd.DataFrame, schema: TableSchema) -> IncompleteDataset:
    keys = [schema.group_column, schema.subject_column]
    _require(frame, keys)
    occasions = schema.occasion_columns or [c for c in frame.columns if c not in keys]
    if not occasions:
        raise SchemaError("no occasion columns")
    _require(frame, occasions)

    frame = frame.assign(**{k: frame[k].str.strip() for k in keys})
    duplicated = frame.duplicated(keys)
    if duplicated.any():
        row = frame[duplicated].iloc[0]
        raise SchemaError(
            f"subject '{row[schema.subject_column]}' appears twice in group '{row[schema.group_column]}'",
            column=schema.subject_column
        )

    parsed = [_parse_values(frame[c], c, schema.missing_token) for c in occasions]
    values = np.column_stack([v for v, _ in parsed])
    mask = np.column_stack([m for _, m in parsed])

    groups = _group_order(frame, schema)
    labels = frame[schema.group_column].to_numpy()
    subjects = frame[schema.subject_column].to_numpy()
    rows = [labels == g for g in groups]
    return IncompleteDataset(
        values=tuple(values[r] for r in rows),
        mask=tuple(mask[r] for r in rows),
        group_labels=tuple(groups),
        subject_ids=tuple(tuple(subjects[r]) for r in rows),
        occasion_labels=tuple(occasions),
    )


def _long_dataset(frame: pd.DataFrame, schema: TableSchema) -> IncompleteDataset:
    keys = [schema.group_column, schema.subject_column]
    _require(frame, keys + [schema.occasion_column, schema.value_column])
    if frame.empty:
        raise SchemaError("table has no rows")

    frame = frame.assign(**{k: frame[k].str.strip() for k in keys})
    occasion = _parse_occasions(frame[schema.occasion_column], schema.occasion_column)
    values, observed = _parse_values(frame[schema.value_column], schema.value_column, schema.missing_token)

    d = int(occasion.max())
    if occasion.min() < 1 or set(occasion) != set(range(1, d + 1)):
        raise SchemaError(
            f"occasions must be the contiguous numbers 1..{d}, got {sorted(set(occasion))}",
            column=schema.occasion_column
        )
    frame = frame.assign(_occasion=occasion)
    duplicated = frame.duplicated(keys + ["_occasion"])
    if duplicated.any():
        row = frame[duplicated].iloc[0]
        raise SchemaError(
            f"subject '{row[schema.subject_column]}' of group '{row[schema.group_column]}' "
            f"has occasion {row['_occasion']} twice",
            column=schema.occasion_column
        )

    groups = _group_order(frame, schema)
    group_values, group_masks, group_subjects = [], [], []
    for g in groups:
        in_group = (frame[schema.group_column] == g).to_numpy()
        subjects = list(dict.fromkeys(frame.loc[in_group, schema.subject_column]))
        position = {s: k for k, s in enumerate(subjects)}
        rows = frame.loc[in_group, schema.subject_column].map(position).to_numpy()
        cols = occasion[in_group] - 1
        vals = np.zeros((len(subjects), d))
        obs = np.zeros((len(subjects), d), dtype=bool)
        vals[rows, cols] = values[in_group]
        obs[rows, cols] = observed[in_group]
        group_values.append(vals)
        group_masks.append(obs)
        group_subjects.append(tuple(subjects))

    return IncompleteDataset(
        values=tuple(group_values),
        mask=tuple(group_masks),
        group_labels=tuple(groups),
        subject_ids=tuple(group_subjects),
        occasion_labels=tuple(str(j) for j in range(1, d + 1)),
    )


def _to_dataset(frame: pd.DataFrame, schema: TableSchema) -> IncompleteDataset:
    if schema.format == TableFormat.LONG:
        return _long_dataset(frame, schema)
    return _wide_dataset(frame, schema)


def read_dataset(path: PathLike, schema: Optional[TableSchema] = None) -> IncompleteDataset:
    """
    Read a CSV table into an incomplete dataset.

    Raises:
        ParseError: a value or occasion cannot be parsed (row and column reported)
        SchemaError: a declared column is absent, or a subject/occasion repeats
    """
    schema = schema or TableSchema()
    dataset = _to_dataset(_read_frame(path), schema)
    logger.info(
        f"Read {path}: a={dataset.a}, d={dataset.d}, n={dataset.n}, "
        f"{dataset.n_observations} observed values"
    )
    return dataset


def read_strata(path: PathLike, column: str, schema: Optional[TableSchema] = None) -> Dict[str, IncompleteDataset]:
    """
    One dataset per level of a stratification column, in first-appearance order.

    Raises:
        SchemaError: the column is absent or a subject spans several levels
    """
    schema = schema or TableSchema()
    frame = _read_frame(path)
    _require(frame, [column])
    levels = frame[column].str.strip()
    keys = [schema.group_column, schema.subject_column]
    _require(frame, keys)
    spans = frame.assign(_level=levels).groupby(keys)["_level"].nunique()
    if (spans > 1).any():
        raise SchemaError(f"subjects must belong to a single '{column}' level", column=column)

    if schema.format == TableFormat.WIDE and schema.occasion_columns is None:
        schema = schema.model_copy(update={
            "occasion_columns": [c for c in frame.columns if c not in keys + [column]]
        })
    strata = {}
    for level in dict.fromkeys(levels):
        strata[level] = _to_dataset(frame[(levels == level).to_numpy()], schema)
    logger.info(f"Read {path}: {len(strata)} strata of '{column}'")
    return strata


def write_dataset(
    dataset: IncompleteDataset,
    path: PathLike,
    group_column: str = "group",
    subject_column: str = "subject",
    missing_token: Optional[str] = None
):
    """WIDE CSV with shortest round-tripping float text and the missing token"""
    token = settings.missing_token if missing_token is None else missing_token
    records = []
    for i, (vals, obs) in enumerate(zip(dataset.values, dataset.mask)):
        for k, subject in enumerate(dataset.subject_ids[i]):
            record = {group_column: dataset.group_labels[i], subject_column: subject}
            for j, label in enumerate(dataset.occasion_labels):
                record[label] = repr(float(vals[k, j])) if obs[k, j] else token
            records.append(record)
    columns = [group_column, subject_column] + list(dataset.occasion_labels)
    pd.DataFrame(records, columns=columns).to_csv(path, index=False)


def read_contrast(path: PathLike) -> np.ndarray:
    """Header-less CSV of contrast rows"""
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as e:
        raise SchemaError(f"cannot read contrast {path}: file not found") from e
    except OSError as e:
        raise SchemaError(f"cannot read contrast {path}: {e.strerror or e}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(f"cannot parse contrast {path}: {e}") from e

    matrix = np.zeros(frame.shape)
    for j, name in enumerate(frame.columns):
        matrix[:, j], _ = _parse_values(frame[name], str(j + 1), token="\0", header_lines=0)
    return matrix


def load_simulation_config(path: PathLike) -> SimulationConfig:
    """
    Raises:
        ConfigError: unreadable JSON or an invalid field (JSON pointer in the message)
    """
    try:
        payload = json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"config {path} not found") from e
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e.msg} (line {e.lineno})", pointer="") from e
    return load_config(payload)
