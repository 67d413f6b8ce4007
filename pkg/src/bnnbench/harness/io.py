"""CSV serialization for benchmark outputs.

All writers emit deterministic bytes: rows are sorted by their key
columns, floats are written with repr (shortest exact round-trip), and
missing values (metrics of diverged runs) are empty fields. Hyperparameter
records are rendered as "key=value" pairs joined by ";" with sorted keys,
so rows stay unquoted and easy to parse from any language.

Column orders (the documented schemas):
  results.csv:  task,algorithm,hp_index,hp,replicate,status,q2,picp,
                mmd_weight,mmd_function,ksd
  aggregates.csv: task,algorithm,hp_index,hp,n_ok,n_diverged,mcp,picp_std,
                ccp_mae,q2_mean,mmd_weight_mean,mmd_function_mean,ksd_mean
  timings.csv:  task,algorithm,hp_index,replicate,wall_time  (NOT
                deterministic; excluded from byte-identity guarantees)
  coverage_curves_<task>.csv: algorithm,hp_index,hp,level,mcp,picp_std,ccp_mae
  ccp_points_<task>.csv: algorithm,hp_index,level,point_index,x,ccp
  mmd_matrix_<task>.csv / mmd_matrix_function_<task>.csv: label,<one column
                per label in the same order>
  mds_<task>.csv / mds_function_<task>.csv: label,algorithm,hp_index,
                step_size,x,y
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

RESULT_COLUMNS = ("task", "algorithm", "hp_index", "hp", "replicate", "status",
                  "q2", "picp", "mmd_weight", "mmd_function", "ksd")
AGGREGATE_COLUMNS = ("task", "algorithm", "hp_index", "hp", "n_ok",
                     "n_diverged", "mcp", "picp_std", "ccp_mae", "q2_mean",
                     "mmd_weight_mean", "mmd_function_mean", "ksd_mean")
TIMING_COLUMNS = ("task", "algorithm", "hp_index", "replicate", "wall_time")
CURVE_COLUMNS = ("algorithm", "hp_index", "hp", "level", "mcp", "picp_std",
                 "ccp_mae")
CCP_COLUMNS = ("algorithm", "hp_index", "level", "point_index", "x", "ccp")
MDS_COLUMNS = ("label", "algorithm", "hp_index", "step_size", "x", "y")


def hp_string(hp: dict) -> str:
    """Canonical one-field rendering of a hyperparameter record."""
    parts = []
    for key in sorted(hp):
        value = hp[key]
        if isinstance(value, float):
            parts.append(f"{key}={value!r}")
        else:
            parts.append(f"{key}={value}")
    return ";".join(parts)


def parse_hp_string(text: str) -> dict:
    """Inverse of hp_string (numbers come back as int or float)."""
    out = {}
    if not text:
        return out
    for part in text.split(";"):
        key, raw = part.split("=", 1)
        try:
            out[key] = int(raw)
        except ValueError:
            out[key] = float(raw)
    return out


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        value = float(value)  # np.float64 reprs don't round-trip as text
        if np.isnan(value):
            return ""
        return repr(value)
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(path: str | Path, header: tuple[str, ...], rows) -> Path:
    """Write rows (sequences or dicts) under the given header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if isinstance(row, dict):
                row = [row.get(col) for col in header]
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path: str | Path) -> list[dict]:
    """Read one of our CSVs back into dict rows (values stay strings)."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def row_sort_key(row: dict):
    return (row["task"], row["algorithm"], int(row["hp_index"]),
            int(row.get("replicate", 0)))


def write_results_csv(path: str | Path, rows: list[dict]) -> Path:
    return write_csv(path, RESULT_COLUMNS, sorted(rows, key=row_sort_key))


def write_aggregates_csv(path: str | Path, rows: list[dict]) -> Path:
    key = lambda r: (r["task"], r["algorithm"], int(r["hp_index"]))
    return write_csv(path, AGGREGATE_COLUMNS, sorted(rows, key=key))


def write_timings_csv(path: str | Path, rows: list[dict]) -> Path:
    return write_csv(path, TIMING_COLUMNS, sorted(rows, key=row_sort_key))


def write_coverage_curves_csv(path: str | Path, rows: list[dict]) -> Path:
    key = lambda r: (r["algorithm"], int(r["hp_index"]), float(r["level"]))
    return write_csv(path, CURVE_COLUMNS, sorted(rows, key=key))


def write_ccp_points_csv(path: str | Path, rows: list[dict]) -> Path:
    key = lambda r: (r["algorithm"], int(r["hp_index"]), int(r["point_index"]))
    return write_csv(path, CCP_COLUMNS, sorted(rows, key=key))


def write_matrix_csv(path: str | Path, labels: list[str],
                     matrix: np.ndarray) -> Path:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape != (len(labels), len(labels)):
        raise ValueError(f"matrix shape {matrix.shape} does not match "
                         f"{len(labels)} labels")
    rows = [[label, *row] for label, row in zip(labels, matrix)]
    return write_csv(path, ("label", *labels), rows)


def read_matrix_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        labels = header[1:]
        data = []
        for row in reader:
            if row[0] != labels[len(data)]:
                raise ValueError(f"matrix row order mismatch at {row[0]!r}")
            data.append([float(v) for v in row[1:]])
    return labels, np.asarray(data, dtype=np.float64)


def write_mds_csv(path: str | Path, rows: list[dict]) -> Path:
    key = lambda r: (r["algorithm"], int(r["hp_index"]))
    return write_csv(path, MDS_COLUMNS, sorted(rows, key=key))
