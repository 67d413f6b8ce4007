"""Command-line entry point.

Subcommands:
  generate   write the synthetic dataset CSVs for the configured tasks
  run        execute the full benchmark sweep and persist every CSV
  compare    emit the PICP-vs-MCP comparison table for one sweep cell
  mds        re-embed a persisted MMD matrix with classical MDS

Configuration precedence per run: scale profile defaults, then the
--config JSON file, then explicit flags (--seed, --tasks, --replicates).
Exit code is 0 unless a fatal error occurs; diverged sweep cells are
recorded in the outputs, not fatal.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .datasets import generate_bundle, save_bundle
from .harness import (ExperimentConfig, picp_mcp_comparison, profile,
                      read_matrix_csv, run_benchmark, write_comparison_csv)
from .harness.io import write_mds_csv
from .harness.seeding import derive_seed
from .metrics import classical_mds


def _load_config(args) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        base = profile(args.scale).to_dict()
        base.update(data)
        cfg = ExperimentConfig.from_dict(base)
    else:
        cfg = profile(args.scale)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "tasks", None):
        overrides["tasks"] = args.tasks
    if getattr(args, "replicates", None):
        overrides["n_replicates"] = args.replicates
    if overrides:
        data = cfg.to_dict()
        data.update(overrides)
        cfg = ExperimentConfig.from_dict(data)
    return cfg


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file overriding the profile defaults")
    parser.add_argument("--scale", choices=("desk", "paper"), default="desk",
                        help="base profile (default: desk)")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed override")
    parser.add_argument("--out", type=Path, required=True,
                        help="output directory")


def _cmd_generate(args) -> int:
    cfg = _load_config(args)
    for task_id in cfg.tasks:
        data_seed = derive_seed(cfg.master_seed, task_id, "data", 0, 0)
        sigma = cfg.sigma_override.get(task_id)
        bundle = generate_bundle(task_id, cfg.n_replicates, data_seed,
                                 sigma=sigma, n_grid=cfg.n_grid)
        path = save_bundle(bundle, args.out / "datasets")
        print(f"{task_id}: {bundle.n_replicates} replicates -> {path}")
    return 0


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    out = run_benchmark(cfg, args.out, workers=args.workers)
    print(f"benchmark finished -> {out / 'results.csv'}")
    return 0


def _cmd_compare(args) -> int:
    comparison = picp_mcp_comparison(args.out, args.task, args.algorithm,
                                     args.hp_index,
                                     min_replicates=args.min_replicates)
    path = args.out / (f"picp_mcp_{args.task}_{args.algorithm}"
                       f"_{args.hp_index}.csv")
    write_comparison_csv(path, comparison)
    print(f"cell {args.task}/{args.algorithm}#{args.hp_index}: "
          f"level={comparison['level']} mcp={comparison['mcp']:.4f} "
          f"picp std={comparison['picp'].std(ddof=1):.4f} "
          f"over {comparison['n_replicates']} replicates")
    print(f"comparison table -> {path}")
    return 0


def _cmd_mds(args) -> int:
    suffix = "function_" if args.space == "function" else ""
    matrix_path = args.out / f"mmd_matrix_{suffix}{args.task}.csv"
    labels, matrix = read_matrix_csv(matrix_path)
    coords = classical_mds(matrix, dim=2).coords

    # Recover each cell's step size from the sweep results when available.
    steps = {}
    results_path = args.out / "results.csv"
    if results_path.exists():
        from .harness import parse_hp_string, read_csv
        for row in read_csv(results_path):
            if row["task"] == args.task:
                hp = parse_hp_string(row["hp"])
                key = (row["algorithm"], int(row["hp_index"]))
                steps[key] = hp.get("step_size")

    rows = []
    for label, (x, y) in zip(labels, coords):
        algorithm, _, idx = label.partition("#")
        hp_index = int(idx) if idx else 0
        rows.append({"label": label, "algorithm": algorithm,
                     "hp_index": hp_index,
                     "step_size": steps.get((algorithm, hp_index)),
                     "x": float(x), "y": float(y)})
    path = args.out / f"mds_{suffix}{args.task}.csv"
    write_mds_csv(path, rows)
    print(f"embedded {len(labels)} cells -> {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bnnbench",
        description="Posterior-approximation benchmark for Bayesian neural "
                    "networks on synthetic regression tasks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write dataset CSVs")
    _add_config_flags(p_gen)
    p_gen.add_argument("--tasks", nargs="+", default=None)
    p_gen.add_argument("--replicates", type=int, default=None)
    p_gen.set_defaults(func=_cmd_generate)

    p_run = sub.add_parser("run", help="run the benchmark sweep")
    _add_config_flags(p_run)
    p_run.add_argument("--tasks", nargs="+", default=None)
    p_run.add_argument("--replicates", type=int, default=None)
    p_run.add_argument("--workers", type=int, default=1,
                       help="process pool width (default: 1)")
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="PICP vs MCP comparison table")
    p_cmp.add_argument("--out", type=Path, required=True,
                       help="benchmark output directory")
    p_cmp.add_argument("--task", required=True)
    p_cmp.add_argument("--algorithm", required=True)
    p_cmp.add_argument("--hp-index", type=int, default=0)
    p_cmp.add_argument("--min-replicates", type=int, default=20)
    p_cmp.set_defaults(func=_cmd_compare)

    p_mds = sub.add_parser("mds", help="re-embed a persisted MMD matrix")
    p_mds.add_argument("--out", type=Path, required=True,
                       help="benchmark output directory")
    p_mds.add_argument("--task", required=True)
    p_mds.add_argument("--space", choices=("weight", "function"),
                       default="weight")
    p_mds.set_defaults(func=_cmd_mds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
