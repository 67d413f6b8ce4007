"""Experiment orchestration: sweep tasks x algorithms x grids x replicates.

Work is chunked per (task, replicate): each chunk trains every sweep cell
against that replicate's training set and scores it against the cached
HMC reference. Chunks are pure functions of their inputs with seeds
derived from (master, task, algorithm, hp_index, replicate), so any
worker count yields identical rows; the collector sorts before writing.

Per task the flow is:
  phase A   generate data, then per replicate: MAP fit, HMC step-size
            tuning, reference chains (disk-cached as .bin + .json)
  phase B1  replicate 0 inline, keeping weight samples: pools the
            median-heuristic KSD lengthscale, builds the pairwise MMD
            matrices (weight and function space) over all cells plus the
            HMC reference, and their MDS embeddings
  phase B2  remaining replicates, optionally in a process pool
"""

from __future__ import annotations

import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..datasets import generate_bundle, save_bundle, task_by_id
from ..metrics import (band_indicators, classical_mds, ksd_imq,
                       median_heuristic, mmd_energy, mmd_matrix, picp,
                       predictive_band, q2, score_from_target)
from ..model import (DivergenceError, MlpArchitecture, PosteriorSpec,
                     RegressionDataset, mlp_forward)
from ..optim import OptConfig, train_map
from ..samplers import (ChainDivergenceError, DropoutConfig, EnsembleError,
                        HmcConfig, SgmcmcConfig, SwagConfig, deep_ensemble,
                        hmc_run, mc_dropout_sample, run_sgmcmc, swag_fit,
                        swag_sample, tune_step_size)
from .config import ExperimentConfig
from .io import (hp_string, write_aggregates_csv, write_ccp_points_csv,
                 write_coverage_curves_csv, write_matrix_csv, write_mds_csv,
                 write_results_csv, write_timings_csv)
from .seeding import derive_seed

_SGMCMC = {
    "sgld": ("sgld", "plain"),
    "sgld-cv": ("sgld", "cv"),
    "sgld-svrg": ("sgld", "svrg"),
    "sgld-cyclical": ("sgld", "cyclical"),
    "psgld": ("sgld", "preconditioned"),
    "sghmc": ("sghmc", "plain"),
    "sghmc-cv": ("sghmc", "cv"),
    "sghmc-svrg": ("sghmc", "svrg"),
    "sghmc-cyclical": ("sghmc", "cyclical"),
}


class ReplicateAborted(RuntimeError):
    """The shared reference for one replicate could not be built."""


@dataclass
class _Cell:
    algorithm: str
    hp_index: int
    hp: dict
    seed: int


@dataclass
class _ReplicateJob:
    """Picklable payload for one (task, replicate) work chunk."""

    task_id: str
    replicate: int
    sizes: tuple[int, ...]
    sigma: float
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray
    grid: np.ndarray
    map_params: np.ndarray
    hmc_samples: np.ndarray
    hmc_fn_grid: np.ndarray
    cells: list[_Cell]
    config: ExperimentConfig
    lengthscale: float | None = None
    keep_samples: bool = False


@dataclass
class _CellResult:
    algorithm: str
    hp_index: int
    hp: dict
    replicate: int
    status: str
    q2: float | None = None
    picp: float | None = None
    mmd_weight: float | None = None
    mmd_function: float | None = None
    ksd: float | None = None
    wall_time: float = 0.0
    indicators: np.ndarray | None = None    # (n_levels, n_test) uint8
    samples: np.ndarray | None = None       # only when keep_samples
    fn_grid: np.ndarray | None = None       # only when keep_samples


def _forward_all(arch: MlpArchitecture, samples: np.ndarray,
                 x: np.ndarray) -> np.ndarray:
    return np.stack([mlp_forward(arch, w, x).reshape(-1) for w in samples])


def _draw_cell(posterior: PosteriorSpec, algorithm: str, hp: dict, seed: int,
               cfg: ExperimentConfig, map_params: np.ndarray) -> np.ndarray:
    """Run one sweep cell and return its weight-space samples."""
    n = posterior.dataset.x.shape[0]
    batch = min(cfg.batch_size, n)
    step = float(hp["step_size"])

    if algorithm in _SGMCMC:
        family, variant = _SGMCMC[algorithm]
        run_cfg = SgmcmcConfig(
            family=family, variant=variant, step_size=step,
            total_iterations=cfg.sgmcmc_iterations,
            burn_in=cfg.sgmcmc_burn_in, batch_size=batch, seed=seed,
            cycles=hp.get("cycles"), thin_target=cfg.thin_target,
            thin_pool=cfg.thin_pool)
        return run_sgmcmc(posterior, run_cfg, map_params).samples

    if algorithm == "swag":
        fit_seed, draw_seed = (int(s) for s in
                               np.random.SeedSequence(seed).generate_state(2))
        fit_cfg = SwagConfig(step_size=step,
                             total_iterations=cfg.swag_iterations,
                             rank=cfg.swag_rank, batch_size=batch,
                             seed=fit_seed)
        model = swag_fit(posterior, fit_cfg, map_params)
        return swag_sample(model, cfg.thin_target, seed=draw_seed).samples

    if algorithm == "ensemble":
        opt = OptConfig(iterations=cfg.ensemble_iterations, init_step=step,
                        final_step=step * 1e-2, batch_size=batch)
        return deep_ensemble(posterior, cfg.ensemble_members, opt,
                             seed=seed).samples

    if algorithm == "mc-dropout":
        opt = OptConfig(iterations=cfg.map_iterations, init_step=step,
                        final_step=step * 1e-2, batch_size=batch)
        drop_cfg = DropoutConfig(rate=float(hp.get("rate", 0.1)),
                                 n_samples=cfg.dropout_samples, opt=opt,
                                 seed=seed)
        return mc_dropout_sample(posterior, drop_cfg).samples

    raise ValueError(f"unknown algorithm {algorithm!r}")


def _run_replicate(job: _ReplicateJob) -> list[_CellResult]:
    """Score every cell of one replicate. Pure in the job payload."""
    cfg = job.config
    arch = MlpArchitecture(job.sizes)
    posterior = PosteriorSpec(RegressionDataset(job.train_x, job.train_y),
                              arch, job.sigma)
    test_y = job.test_y.reshape(-1)
    results = []
    for cell in job.cells:
        start = time.perf_counter()
        res = _CellResult(cell.algorithm, cell.hp_index, cell.hp,
                          job.replicate, "ok")
        try:
            samples = _draw_cell(posterior, cell.algorithm, cell.hp,
                                 cell.seed, cfg, job.map_params)
            fn_test = _forward_all(arch, samples, job.test_x)
            fn_grid = _forward_all(arch, samples, job.grid)

            indicators = np.empty((len(cfg.levels), test_y.size),
                                  dtype=np.uint8)
            for i, level in enumerate(cfg.levels):
                lo, hi = predictive_band(fn_test, level)
                indicators[i] = band_indicators(test_y, lo, hi)
            headline = cfg.levels.index(cfg.headline_level)

            res.q2 = q2(test_y, fn_test.mean(axis=0))
            res.picp = picp(indicators[headline])
            res.mmd_weight = mmd_energy(samples, job.hmc_samples)
            res.mmd_function = mmd_energy(fn_grid, job.hmc_fn_grid)
            if job.lengthscale is not None:
                scores = score_from_target(posterior, samples)
                res.ksd = ksd_imq(samples, scores, job.lengthscale)
            res.indicators = indicators
            if job.keep_samples:
                res.samples = samples
                res.fn_grid = fn_grid
        except (ChainDivergenceError, DivergenceError, EnsembleError):
            res.status = "diverged"
        res.wall_time = time.perf_counter() - start
        results.append(res)
    return results


# ---------------------------------------------------------------------------
# Phase A: shared per-replicate work (MAP + HMC reference), disk-cached


def _cache_manifest(cfg: ExperimentConfig, task_id: str, replicate: int,
                    sizes: tuple[int, ...], sigma: float, data_seed: int) -> dict:
    return {
        "task": task_id,
        "replicate": replicate,
        "data_seed": data_seed,
        "sizes": list(sizes),
        "sigma": sigma,
        "map_seed": derive_seed(cfg.master_seed, task_id, "map", 0, replicate),
        "tune_seed": derive_seed(cfg.master_seed, task_id, "hmc-tune", 0,
                                 replicate),
        "hmc_seed": derive_seed(cfg.master_seed, task_id, "hmc", 0, replicate),
        "map_iterations": cfg.map_iterations,
        "n_chains": cfg.hmc.n_chains,
        "n_iterations": cfg.hmc.n_iterations,
        "burn_in": cfg.hmc.burn_in,
        "leapfrog_steps": cfg.hmc.leapfrog_steps,
        "tune_low": cfg.hmc.tune_low,
        "tune_high": cfg.hmc.tune_high,
    }


def _prepare_replicate(cfg: ExperimentConfig, task_id: str, replicate: int,
                       posterior: PosteriorSpec, cache_dir: Path,
                       data_seed: int):
    """MAP params plus the HMC reference sample, cached on disk.

    Returns (map_params, hmc_samples, tuned_step, acceptance_rate,
    wall_time); wall_time is 0.0 on a cache hit.
    """
    sizes = posterior.arch.layer_sizes
    manifest = _cache_manifest(cfg, task_id, replicate, sizes,
                               posterior.noise_sigma, data_seed)
    stem = f"{task_id}_rep{replicate:03d}"
    json_path = cache_dir / f"{stem}.json"
    map_path = cache_dir / f"{stem}_map.bin"
    hmc_path = cache_dir / f"{stem}_hmc.bin"

    if json_path.exists() and map_path.exists() and hmc_path.exists():
        with open(json_path) as fh:
            stored = json.load(fh)
        if all(stored.get(k) == v for k, v in manifest.items()):
            dim = posterior.dim
            map_params = np.fromfile(map_path, dtype="<f8")
            hmc = np.fromfile(hmc_path, dtype="<f8").reshape(-1, dim)
            if map_params.shape == (dim,) and hmc.shape[0] > 0:
                return (map_params, hmc, float(stored["step_size"]),
                        float(stored["acceptance_rate"]), 0.0)

    start = time.perf_counter()
    try:
        map_result = train_map(posterior, OptConfig(
            iterations=cfg.map_iterations, seed=manifest["map_seed"]))
        tune_cfg = HmcConfig(
            n_chains=cfg.hmc.n_chains, n_iterations=cfg.hmc.n_iterations,
            burn_in=cfg.hmc.burn_in, leapfrog_steps=cfg.hmc.leapfrog_steps,
            seed=manifest["tune_seed"])
        step, rate = tune_step_size(posterior, map_result.params, tune_cfg,
                                    low=cfg.hmc.tune_low,
                                    high=cfg.hmc.tune_high)
        run_cfg = replace(tune_cfg, step_size=step, seed=manifest["hmc_seed"])
        reference = hmc_run(posterior, run_cfg, map_result.params)
        # the pilot only lower-bounds what the full multi-chain run will
        # see; the protocol constrains the reference run's own rate, so
        # walk the step down until the run itself clears the floor
        retries = 0
        while (reference.info["acceptance_rate"] < cfg.hmc.min_rate
               and retries < 4):
            step /= math.sqrt(2.0)
            run_cfg = replace(run_cfg, step_size=step)
            reference = hmc_run(posterior, run_cfg, map_result.params)
            retries += 1
    except (DivergenceError, ValueError) as exc:
        raise ReplicateAborted(
            f"HMC reference failed for {task_id} replicate {replicate}: {exc}"
        ) from exc
    wall = time.perf_counter() - start

    cache_dir.mkdir(parents=True, exist_ok=True)
    map_result.params.astype("<f8").tofile(map_path)
    reference.samples.astype("<f8").tofile(hmc_path)
    record = dict(manifest)
    record.update({
        "step_size": step,
        "acceptance_rate": reference.info["acceptance_rate"],
        "tuned_pilot_rate": rate,
        "tune_retries": retries,
        "divergences": reference.info["divergences"],
        "map_potential": map_result.potential,
        "n_samples": int(reference.n),
        "dim": int(reference.dim),
        "dtype": "float64",
    })
    with open(json_path, "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return (map_result.params, reference.samples, step,
            float(reference.info["acceptance_rate"]), wall)


# ---------------------------------------------------------------------------
# Aggregation helpers


def _cell_label(algorithm: str, hp_index: int) -> str:
    return f"{algorithm}#{hp_index}"


def _aggregate_task(task_id: str, cfg: ExperimentConfig,
                    cell_keys: list[tuple[str, int, dict]],
                    results: dict[tuple[str, int], list[_CellResult]]):
    """Aggregate and coverage-curve rows for one task."""
    aggregates, curves = [], []
    headline = cfg.levels.index(cfg.headline_level)
    for algorithm, hp_index, hp in cell_keys:
        rows = results.get((algorithm, hp_index), [])
        ok = [r for r in rows if r.status == "ok"]
        n_diverged = len(rows) - len(ok)
        base = {"task": task_id, "algorithm": algorithm,
                "hp_index": hp_index, "hp": hp_string(hp)}
        if not ok:
            aggregates.append({**base, "n_ok": 0, "n_diverged": n_diverged})
            continue

        stack = np.stack([r.indicators for r in ok])  # (n_ok, L, n_test)
        picps = stack.mean(axis=2)                    # (n_ok, L)
        ccp = stack.mean(axis=0)                      # (L, n_test)
        mcp_by_level = picps.mean(axis=0)
        std_by_level = picps.std(axis=0, ddof=1) if len(ok) > 1 else \
            np.zeros(len(cfg.levels))
        mae_by_level = np.array([
            np.abs(ccp[i] - level).mean() for i, level in enumerate(cfg.levels)])

        aggregates.append({
            **base,
            "n_ok": len(ok),
            "n_diverged": n_diverged,
            "mcp": float(mcp_by_level[headline]),
            "picp_std": float(std_by_level[headline]),
            "ccp_mae": float(mae_by_level[headline]),
            "q2_mean": float(np.mean([r.q2 for r in ok])),
            "mmd_weight_mean": float(np.mean([r.mmd_weight for r in ok])),
            "mmd_function_mean": float(np.mean([r.mmd_function for r in ok])),
            "ksd_mean": float(np.mean([r.ksd for r in ok
                                       if r.ksd is not None])),
        })
        for i, level in enumerate(cfg.levels):
            curves.append({
                "algorithm": algorithm, "hp_index": hp_index,
                "hp": base["hp"], "level": level,
                "mcp": float(mcp_by_level[i]),
                "picp_std": float(std_by_level[i]),
                "ccp_mae": float(mae_by_level[i]),
            })
    return aggregates, curves


def _ccp_point_rows(cfg: ExperimentConfig, test_x: np.ndarray,
                    cell_keys: list[tuple[str, int, dict]],
                    results: dict[tuple[str, int], list[_CellResult]]):
    headline = cfg.levels.index(cfg.headline_level)
    xs = test_x.reshape(len(test_x), -1)[:, 0]
    rows = []
    for algorithm, hp_index, _ in cell_keys:
        ok = [r for r in results.get((algorithm, hp_index), [])
              if r.status == "ok"]
        if not ok:
            continue
        ccp = np.stack([r.indicators[headline] for r in ok]).mean(axis=0)
        for j, (x, c) in enumerate(zip(xs, ccp)):
            rows.append({"algorithm": algorithm, "hp_index": hp_index,
                         "level": cfg.headline_level, "point_index": j,
                         "x": float(x), "ccp": float(c)})
    return rows


# ---------------------------------------------------------------------------
# Top-level driver


def run_benchmark(config: ExperimentConfig, out_dir: str | Path,
                  workers: int = 1) -> Path:
    """Run the configured sweep and persist every output CSV under out_dir."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config.to_json(out / "config.json")
    cache_dir = out / "cache"

    all_rows, all_timings, all_aggregates = [], [], []

    for task_id in config.tasks:
        task = task_by_id(task_id)
        sigma = float(config.sigma_override.get(task_id, task.sigma))
        arch = task.surrogate_arch(config.hidden_width)
        sizes = arch.layer_sizes
        data_seed = derive_seed(config.master_seed, task_id, "data", 0, 0)
        bundle = generate_bundle(task, config.n_replicates, data_seed,
                                 sigma=sigma, n_grid=config.n_grid)
        save_bundle(bundle, out / "datasets")

        # Phase A: shared reference per replicate.
        prepared = {}
        for r in range(config.n_replicates):
            posterior = PosteriorSpec(bundle.train_sets[r], arch, sigma)
            try:
                map_params, hmc, step, rate, wall = _prepare_replicate(
                    config, task_id, r, posterior, cache_dir, data_seed)
            except ReplicateAborted as exc:
                warnings.warn(str(exc))
                continue
            prepared[r] = (map_params, hmc, step, rate)
            if wall > 0.0:
                all_timings.append({"task": task_id, "algorithm": "hmc",
                                    "hp_index": 0, "replicate": r,
                                    "wall_time": wall})

        if not prepared:
            warnings.warn(f"no usable replicates for {task_id}; skipping task")
            continue

        cell_keys = [(spec.algorithm, i, hp)
                     for spec in config.algorithms
                     for i, hp in enumerate(spec.grid)]

        def make_job(r: int, lengthscale: float | None,
                     keep: bool) -> _ReplicateJob:
            map_params, hmc, _, _ = prepared[r]
            cells = [
                _Cell(algorithm, i, hp,
                      derive_seed(config.master_seed, task_id, algorithm, i, r))
                for algorithm, i, hp in cell_keys
            ]
            return _ReplicateJob(
                task_id=task_id, replicate=r, sizes=sizes, sigma=sigma,
                train_x=bundle.train_sets[r].x, train_y=bundle.train_sets[r].y,
                test_x=bundle.test.x, test_y=bundle.test.y, grid=bundle.grid,
                map_params=map_params, hmc_samples=hmc,
                hmc_fn_grid=_forward_all(arch, hmc, bundle.grid),
                cells=cells, config=config, lengthscale=lengthscale,
                keep_samples=keep)

        replicate_ids = sorted(prepared)
        first = replicate_ids[0]

        # Phase B1: first usable replicate inline, keeping samples.
        job0 = make_job(first, None, True)
        results0 = _run_replicate(job0)

        posterior0 = PosteriorSpec(bundle.train_sets[first], arch, sigma)
        ok0 = [r for r in results0 if r.status == "ok"]
        pool = [prepared[first][1][:128]]
        pool.extend(r.samples[:64] for r in ok0)
        lengthscale = median_heuristic(np.vstack(pool), max_points=1024)
        for r in ok0:
            scores = score_from_target(posterior0, r.samples)
            r.ksd = ksd_imq(r.samples, scores, lengthscale)

        labels = ["hmc"] + [_cell_label(r.algorithm, r.hp_index) for r in ok0]
        weight_sets = [prepared[first][1]] + [r.samples for r in ok0]
        fn_sets = [job0.hmc_fn_grid] + [r.fn_grid for r in ok0]
        wmat = mmd_matrix(weight_sets)
        fmat = mmd_matrix(fn_sets)
        write_matrix_csv(out / f"mmd_matrix_{task_id}.csv", labels, wmat)
        write_matrix_csv(out / f"mmd_matrix_function_{task_id}.csv", labels,
                         fmat)

        hp_by_cell = {(a, i): hp for a, i, hp in cell_keys}
        mds_rows = []
        for name, mat in (("", wmat), ("function_", fmat)):
            coords = classical_mds(mat, dim=2).coords
            rows = []
            for label, (x, y) in zip(labels, coords):
                if label == "hmc":
                    algorithm, hp_index = "hmc", 0
                    step = prepared[first][2]
                else:
                    algorithm, idx = label.split("#")
                    hp_index = int(idx)
                    step = float(hp_by_cell[(algorithm, hp_index)]["step_size"])
                rows.append({"label": label, "algorithm": algorithm,
                             "hp_index": hp_index, "step_size": step,
                             "x": float(x), "y": float(y)})
            write_mds_csv(out / f"mds_{name}{task_id}.csv", rows)
            mds_rows.append(rows)

        for r in results0:
            r.samples = None
            r.fn_grid = None

        # Phase B2: remaining replicates, optionally in a process pool.
        rest = replicate_ids[1:]
        jobs = [make_job(r, lengthscale, False) for r in rest]
        if workers > 1 and jobs:
            with ProcessPoolExecutor(max_workers=workers) as pool_exec:
                chunks = list(pool_exec.map(_run_replicate, jobs))
        else:
            chunks = [_run_replicate(job) for job in jobs]

        results: dict[tuple[str, int], list[_CellResult]] = {}
        for chunk in [results0, *chunks]:
            for res in chunk:
                results.setdefault((res.algorithm, res.hp_index),
                                   []).append(res)
                all_rows.append({
                    "task": task_id, "algorithm": res.algorithm,
                    "hp_index": res.hp_index, "hp": hp_string(res.hp),
                    "replicate": res.replicate, "status": res.status,
                    "q2": res.q2, "picp": res.picp,
                    "mmd_weight": res.mmd_weight,
                    "mmd_function": res.mmd_function, "ksd": res.ksd,
                })
                all_timings.append({
                    "task": task_id, "algorithm": res.algorithm,
                    "hp_index": res.hp_index, "replicate": res.replicate,
                    "wall_time": res.wall_time,
                })

        aggregates, curves = _aggregate_task(task_id, config, cell_keys,
                                             results)
        all_aggregates.extend(aggregates)
        write_coverage_curves_csv(out / f"coverage_curves_{task_id}.csv",
                                  curves)
        write_ccp_points_csv(
            out / f"ccp_points_{task_id}.csv",
            _ccp_point_rows(config, bundle.test.x, cell_keys, results))

    write_results_csv(out / "results.csv", all_rows)
    write_aggregates_csv(out / "aggregates.csv", all_aggregates)
    write_timings_csv(out / "timings.csv", all_timings)
    return out
