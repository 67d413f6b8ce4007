"""PICP-vs-MCP comparison tables from a finished benchmark directory.

A single PICP (coverage over the test set for one training set) can sit
near the target level even when the marginal and conditional coverages
are far from it; the comparison table exposes that by putting the full
PICP histogram next to the single-scalar MCP and the per-point CCP
histogram.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np

from .io import read_csv, write_csv

COMPARISON_COLUMNS = ("task", "algorithm", "hp_index", "kind", "index",
                      "value")


def picp_mcp_comparison(results_dir: str | Path, task: str, algorithm: str,
                        hp_index: int, min_replicates: int = 20) -> dict:
    """Comparison data for one sweep cell at the headline coverage level.

    Returns a dict with the target level, the MCP, the per-replicate
    PICPs (histogram data over training sets) and the per-test-point
    CCPs (histogram data over test inputs). Fewer ok replicates than
    min_replicates triggers a warning but still emits the table.
    """
    results_dir = Path(results_dir)
    rows = [r for r in read_csv(results_dir / "results.csv")
            if r["task"] == task and r["algorithm"] == algorithm
            and int(r["hp_index"]) == int(hp_index)]
    if not rows:
        raise ValueError(f"no rows for {task}/{algorithm}#{hp_index} in "
                         f"{results_dir / 'results.csv'}")
    ok = [r for r in rows if r["status"] == "ok"]
    if not ok:
        raise ValueError(f"every replicate of {task}/{algorithm}#{hp_index} "
                         f"diverged; nothing to compare")
    if len(ok) < min_replicates:
        warnings.warn(f"{task}/{algorithm}#{hp_index} has only {len(ok)} ok "
                      f"replicates (wanted >= {min_replicates}); the PICP "
                      f"histogram will be coarse")

    picps = np.array([float(r["picp"]) for r in ok])

    ccp_rows = [r for r in read_csv(results_dir / f"ccp_points_{task}.csv")
                if r["algorithm"] == algorithm
                and int(r["hp_index"]) == int(hp_index)]
    if not ccp_rows:
        raise ValueError(f"no CCP point data for {task}/{algorithm}#{hp_index}")
    level = float(ccp_rows[0]["level"])
    ccp_rows.sort(key=lambda r: int(r["point_index"]))
    ccps = np.array([float(r["ccp"]) for r in ccp_rows])

    return {
        "task": task,
        "algorithm": algorithm,
        "hp_index": int(hp_index),
        "level": level,
        "mcp": float(picps.mean()),
        "picp": picps,
        "ccp": ccps,
        "n_replicates": len(ok),
    }


def write_comparison_csv(path: str | Path, comparison: dict) -> Path:
    """Serialize a comparison dict as tidy (kind, index, value) rows."""
    base = (comparison["task"], comparison["algorithm"],
            comparison["hp_index"])
    rows = [
        (*base, "level", 0, comparison["level"]),
        (*base, "mcp", 0, comparison["mcp"]),
    ]
    rows.extend((*base, "picp", i, float(v))
                for i, v in enumerate(comparison["picp"]))
    rows.extend((*base, "ccp", i, float(v))
                for i, v in enumerate(comparison["ccp"]))
    return write_csv(path, COMPARISON_COLUMNS, rows)
