"""CSV schemas for the command-line reports.

Floats are written in shortest round-trip form (``repr``), booleans as
``true``/``false``. Columns listed in ``timing`` depend on the machine and
are excluded from the determinism guarantee.
"""
import csv
import io
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .errors import SchemaMismatch


@dataclass(frozen=True)
class CsvSchema:
    name: str
    columns: tuple
    types: tuple
    timing: tuple = ()

    def __post_init__(self):
        if len(self.columns) != len(self.types):
            raise ValueError("columns and types differ in length")


SOLVE = CsvSchema(
    "solve",
    ("mode", "n", "nnz", "backend", "iterations", "converged", "final_residual",
     "a_norm_est", "factor_seconds", "total_seconds"),
    (str, int, int, str, int, bool, float, float, float, float),
    timing=("factor_seconds", "total_seconds"),
)
COND_SWEEP = CsvSchema(
    "cond-sweep",
    ("kappa", "n", "trials", "mean_iters", "failure_rate", "predicted_iters"),
    (float, int, int, float, float, float),
)
BENCH = CsvSchema(
    "bench",
    ("n", "dp_seconds", "sp_seconds", "mixed_seconds", "speedup_mixed", "iterations"),
    (int, float, float, float, float, int),
    timing=("dp_seconds", "sp_seconds", "mixed_seconds", "speedup_mixed"),
)


def _format(value, typ):
    if typ is bool:
        if not isinstance(value, (bool, np.bool_)):
            raise SchemaMismatch(f"expected a boolean, got {value!r}")
        return "true" if value else "false"
    if typ is int:
        if isinstance(value, float) and not value.is_integer():
            raise SchemaMismatch(f"expected an integer, got {value!r}")
        return str(int(value))
    if typ is float:
        return repr(float(value))
    return str(value)


def _parse(text, typ):
    if typ is bool:
        if text not in ("true", "false"):
            raise SchemaMismatch(f"expected true/false, got {text!r}")
        return text == "true"
    try:
        return typ(text)
    except ValueError:
        raise SchemaMismatch(f"cannot read {text!r} as {typ.__name__}") from None


def _field(row, col):
    if isinstance(row, Mapping):
        if col not in row:
            raise SchemaMismatch(f"row is missing column {col!r}")
        return row[col]
    try:
        return getattr(row, col)
    except AttributeError:
        raise SchemaMismatch(f"row is missing column {col!r}") from None


def write_csv(rows, schema):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(schema.columns)
    for row in rows:
        if isinstance(row, Mapping):
            extra = set(row) - set(schema.columns)
            if extra:
                raise SchemaMismatch(f"unexpected columns {sorted(extra)}")
        writer.writerow(_format(_field(row, c), t) for c, t in zip(schema.columns, schema.types))
    return buf.getvalue()


def parse_csv(text, schema):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaMismatch("missing header row") from None
    if tuple(header) != schema.columns:
        raise SchemaMismatch(f"header {header} does not match schema {schema.name!r}")
    rows = []
    for rec in reader:
        if len(rec) != len(schema.columns):
            raise SchemaMismatch(f"record has {len(rec)} fields, expected {len(schema.columns)}")
        rows.append({c: _parse(v, t) for c, v, t in zip(schema.columns, rec, schema.types)})
    return rows
