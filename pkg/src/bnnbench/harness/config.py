"""Benchmark sweep configuration: algorithm grids, scale profiles, JSON I/O."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from ..datasets import TASK_IDS, task_by_id

# Algorithms runnable as sweep cells. HMC is the per-replicate reference,
# not a cell.
ALGORITHMS = (
    "sgld", "sgld-cv", "sgld-svrg", "sgld-cyclical", "psgld",
    "sghmc", "sghmc-cv", "sghmc-svrg", "sghmc-cyclical",
    "swag", "ensemble", "mc-dropout",
)

DEFAULT_LEVELS = tuple(round(0.05 * k, 2) for k in range(1, 20))


def _logspace(lo_exp: float, hi_exp: float, n: int = 10) -> list[float]:
    return [float(v) for v in np.logspace(lo_exp, hi_exp, n)]


def step_grid(algorithm: str, n: int = 10) -> list[float]:
    """The benchmark's per-algorithm step-size grid (log-spaced)."""
    if algorithm.startswith("sgld"):
        return _logspace(-8, -5, n)
    if algorithm.startswith("sghmc"):
        return _logspace(-8, -6, n)
    if algorithm in ("psgld", "ensemble", "mc-dropout"):
        return _logspace(-4, -1, n)
    if algorithm == "swag":
        return _logspace(-7, -5, n)
    raise ValueError(f"no default grid for algorithm {algorithm!r}")


@dataclass
class GridSpec:
    """One algorithm plus the list of hyperparameter records to sweep.

    Every record needs a positive step_size; cyclical records need a
    cycle count; mc-dropout records may carry a rate.
    """

    algorithm: str
    grid: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; "
                             f"expected one of {ALGORITHMS}")
        if not self.grid:
            raise ValueError(f"empty grid for {self.algorithm}")
        for hp in self.grid:
            step = hp.get("step_size")
            if step is None or float(step) <= 0:
                raise ValueError(f"{self.algorithm}: every grid record needs a "
                                 f"positive step_size, got {hp}")
            if self.algorithm.endswith("cyclical"):
                if int(hp.get("cycles", 0)) < 1:
                    raise ValueError(f"{self.algorithm}: cyclical records need "
                                     f"a positive cycle count, got {hp}")
            if "rate" in hp and not 0.0 <= float(hp["rate"]) < 1.0:
                raise ValueError(f"dropout rate must lie in [0, 1), got {hp}")


def default_grids(scale: str = "desk") -> list[GridSpec]:
    """Full algorithm list with the benchmark grids.

    The paper-scale profile crosses cyclical samplers with cycle counts
    {10, 100, 1000} and mc-dropout with rates {0.1..0.5}; desk scale pins
    cycles=10 and rate=0.1 to keep the sweep affordable.
    """
    cycles = [10] if scale == "desk" else [10, 100, 1000]
    rates = [0.1] if scale == "desk" else [0.1, 0.2, 0.3, 0.4, 0.5]
    specs = []
    for algorithm in ALGORITHMS:
        steps = step_grid(algorithm)
        if algorithm.endswith("cyclical"):
            grid = [{"step_size": s, "cycles": m} for m in cycles for s in steps]
        elif algorithm == "mc-dropout":
            grid = [{"step_size": s, "rate": r} for r in rates for s in steps]
        else:
            grid = [{"step_size": s} for s in steps]
        specs.append(GridSpec(algorithm, grid))
    return specs


@dataclass
class HmcProfile:
    """Reference-chain settings (step size is tuned per replicate)."""

    n_chains: int = 3
    n_iterations: int = 200
    burn_in: int = 100
    leapfrog_steps: int = 100
    # the tuner pilots measure equilibrated acceptance, a floor on the
    # production rate; 0.85 leaves the production 0.80 clear of pilot noise
    tune_low: float = 0.85
    tune_high: float = 0.95
    # protocol floor on the reference run's own acceptance rate; when a
    # tuned step misses it the step is walked down and the run redone
    min_rate: float = 0.80

    def __post_init__(self):
        if self.n_chains < 1 or self.n_iterations < 1 or self.leapfrog_steps < 1:
            raise ValueError("HMC chain counts and lengths must be positive")
        if not 0 <= self.burn_in < self.n_iterations:
            raise ValueError("HMC burn_in must lie in [0, n_iterations)")
        if not 0.0 <= self.min_rate < 1.0:
            raise ValueError("HMC min_rate must lie in [0, 1)")
        if not 0.0 < self.tune_low < self.tune_high < 1.0:
            raise ValueError("tuning window must satisfy 0 < low < high < 1")


@dataclass
class ExperimentConfig:
    """Everything a benchmark run needs besides the output directory."""

    tasks: list[str] = field(default_factory=lambda: list(TASK_IDS))
    algorithms: list[GridSpec] = field(default_factory=default_grids)
    n_replicates: int = 20
    master_seed: int = 0
    hidden_width: int | None = 20      # None keeps each task's own widths
    levels: tuple[float, ...] = DEFAULT_LEVELS
    headline_level: float = 0.95
    thin_target: int = 500
    thin_pool: int = 1024
    sgmcmc_iterations: int = 20000
    sgmcmc_burn_in: int | None = None  # None = half the iterations
    batch_size: int = 32
    swag_iterations: int = 2000
    swag_rank: int = 20
    ensemble_members: int = 50
    ensemble_iterations: int = 3000
    dropout_samples: int = 500
    map_iterations: int = 5000
    hmc: HmcProfile = field(default_factory=HmcProfile)
    n_grid: int = 200
    sigma_override: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tasks:
            raise ValueError("no tasks configured")
        for t in self.tasks:
            task_by_id(t)  # raises on unknown ids
        if not self.algorithms:
            raise ValueError("no algorithms configured")
        if self.n_replicates < 1:
            raise ValueError("n_replicates must be >= 1")
        if not self.levels:
            raise ValueError("empty coverage level grid")
        for lv in (*self.levels, self.headline_level):
            if not 0.0 < lv < 1.0:
                raise ValueError(f"coverage level must lie in (0, 1), got {lv}")
        if self.headline_level not in self.levels:
            raise ValueError("headline_level must be one of the levels")
        for name in ("thin_target", "thin_pool", "sgmcmc_iterations",
                     "batch_size", "swag_iterations", "swag_rank",
                     "ensemble_members", "ensemble_iterations",
                     "dropout_samples", "map_iterations", "n_grid"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.hidden_width is not None and self.hidden_width < 1:
            raise ValueError("hidden_width must be >= 1 when set")
        for task_id, sigma in self.sigma_override.items():
            task_by_id(task_id)
            if float(sigma) < 0:
                raise ValueError(f"sigma override for {task_id} must be >= 0")

    @property
    def n_cells(self) -> int:
        return sum(len(spec.grid) for spec in self.algorithms)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path: str | Path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "algorithms" in data:
            data["algorithms"] = [
                spec if isinstance(spec, GridSpec) else GridSpec(**spec)
                for spec in data["algorithms"]
            ]
        if "hmc" in data and not isinstance(data["hmc"], HmcProfile):
            data["hmc"] = HmcProfile(**data["hmc"])
        if "levels" in data:
            data["levels"] = tuple(data["levels"])
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def profile(scale: str = "desk", **overrides) -> ExperimentConfig:
    """Built-in scale profiles.

    desk: widths 20, 2e4 SGMCMC iterations, 20 replicates, short HMC
    with 100 leapfrog steps. paper: the full protocol (500 replicates,
    task-native widths, 1e5 iterations, 10^4 leapfrog steps); expect
    cluster-class runtimes.
    """
    if scale == "desk":
        base = ExperimentConfig(algorithms=default_grids("desk"))
    elif scale == "paper":
        base = ExperimentConfig(
            algorithms=default_grids("paper"),
            n_replicates=500,
            hidden_width=None,
            sgmcmc_iterations=100000,
            ensemble_iterations=10000,
            hmc=HmcProfile(leapfrog_steps=10000),
        )
    else:
        raise ValueError(f"unknown scale {scale!r}; expected desk or paper")
    return replace(base, **overrides) if overrides else base
