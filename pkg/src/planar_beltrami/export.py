"""
Writers and readers for run outputs.

CSV files start with a block of ``# key: value`` lines (config hash, schema
version, tolerances), followed by the header row of the table's schema.
Floats are written with Python's shortest round-trip repr, so identical runs
produce byte-identical files. JSON files carry the same block under "meta".
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Mapping, Union

import numpy as np
import pyarrow as pa
import pyarrow.csv as pa_csv

from .schema import SCHEMA_VERSION, get_field_names, get_table_schema

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _meta_value(value: Any) -> str:
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return _format(value)


def build_meta(config_hash: str, tolerances: Mapping[str, Any], **extra: Any) -> dict[str, Any]:
    """Metadata block shared by every output of a run."""
    meta: dict[str, Any] = {
        "config_hash": config_hash,
        "schema_version": SCHEMA_VERSION,
        "tolerances": dict(tolerances),
    }
    meta.update(extra)
    return meta


def write_table(
    path: PathLike,
    table_name: str,
    columns: Mapping[str, Any],
    meta: Mapping[str, Any],
) -> Path:
    """
    Write columns as CSV under the schema of table_name.

    Raises:
        ValueError: If a schema column is missing or columns differ in length
    """
    path = Path(path)
    names = get_field_names(table_name)
    missing = [name for name in names if name not in columns]
    if missing:
        raise ValueError(f"Missing columns for table {table_name!r}: {missing}")
    data = [list(np.ravel(np.asarray(columns[name], dtype=object))) for name in names]
    lengths = {len(col) for col in data}
    if len(lengths) > 1:
        raise ValueError(f"Columns of table {table_name!r} differ in length: {sorted(lengths)}")

    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        for key, value in meta.items():
            handle.write(f"# {key}: {_meta_value(value)}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([_format(v) for v in row])
    logger.debug("Wrote %s (%d rows) to %s", table_name, len(data[0]) if data else 0, path)
    return path


def read_meta(path: PathLike) -> dict[str, str]:
    """The ``# key: value`` block at the top of a CSV file."""
    meta: dict[str, str] = {}
    with Path(path).open() as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
    return meta


def read_table(path: PathLike, table_name: str) -> pa.Table:
    """Read a CSV written by write_table with the schema's column types."""
    schema = get_table_schema(table_name)
    skip = len(read_meta(path))
    return pa_csv.read_csv(
        str(path),
        read_options=pa_csv.ReadOptions(skip_rows=skip),
        convert_options=pa_csv.ConvertOptions(
            column_types={f.name: f.type for f in schema},
            true_values=["true"],
            false_values=["false"],
        ),
    )


def write_json(path: PathLike, payload: Mapping[str, Any], meta: Mapping[str, Any]) -> Path:
    """Write a JSON document with meta first; keys sorted for reproducibility."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"meta": dict(meta), **payload}
    path.write_text(json.dumps(document, indent=2, sort_keys=True, default=_jsonable) + "\n")
    logger.debug("Wrote %s", path)
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")
