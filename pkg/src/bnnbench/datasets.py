"""Seeded generators for the four synthetic regression tasks.

Each task is a 1-d homoscedastic regression. A bundle holds n_replicates
independent training sets, one test set shared by every replicate, the
noiseless latent values at the test inputs, and an evenly spaced grid over
the test support for function-space comparisons. Inputs on interval
unions are drawn from the length-proportional mixture.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import MlpArchitecture, RegressionDataset, mlp_forward

Interval = tuple[float, float]


@dataclass(frozen=True)
class TaskSpec:
    """Static description of one synthetic regression task."""

    task_id: str
    latent: str                      # one of cos2_sin, cubic, quadratic, damped_sine, teacher
    sigma: float
    n_train: int
    n_test: int
    train_intervals: tuple[Interval, ...]
    test_intervals: tuple[Interval, ...]
    ood: bool
    surrogate_hidden: tuple[int, ...]   # hidden widths of the fitted network
    teacher_hidden: tuple[int, ...] = ()  # data-generating net (teacher tasks only)
    pinned_inner: int = 0            # inputs forced into the first train interval

    def surrogate_arch(self, hidden_width: int | None = None) -> MlpArchitecture:
        """Surrogate network; hidden_width overrides every hidden layer."""
        hidden = self.surrogate_hidden
        if hidden_width is not None:
            hidden = tuple(hidden_width for _ in hidden)
        return MlpArchitecture((1, *hidden, 1))

    @property
    def test_support(self) -> Interval:
        los, his = zip(*self.test_intervals)
        return min(los), max(his)

    @property
    def dense_train_intervals(self) -> tuple[Interval, ...]:
        """Train intervals carrying the bulk of the mass; the pinned sparse
        region (if any) is excluded, since OOD-ness is relative to where
        training data concentrates."""
        if self.pinned_inner:
            return self.train_intervals[1:]
        return self.train_intervals


def _tasks() -> dict[str, TaskSpec]:
    return {
        "AF1": TaskSpec(
            task_id="AF1", latent="cos2_sin", sigma=0.2, n_train=100, n_test=200,
            train_intervals=((-3.0, 3.0),), test_intervals=((-3.0, 3.0),),
            ood=False, surrogate_hidden=(100, 100)),
        "AF2": TaskSpec(
            task_id="AF2", latent="cubic", sigma=0.25, n_train=100, n_test=200,
            train_intervals=((-4.0, -1.0), (1.0, 4.0)),
            test_intervals=((-4.0, 4.0),),
            ood=True, surrogate_hidden=(50, 50)),
        "AF3": TaskSpec(
            # noise stated as a variance of 0.25
            task_id="AF3", latent="damped_sine", sigma=0.5, n_train=82, n_test=200,
            train_intervals=((-2.0, 2.0), (-6.0, -2.0), (2.0, 6.0)),
            test_intervals=((-6.0, 6.0),),
            ood=True, surrogate_hidden=(50, 50), pinned_inner=2),
        "AF4": TaskSpec(
            task_id="AF4", latent="teacher", sigma=0.02, n_train=120, n_test=120,
            train_intervals=((-10.0, -6.0), (6.0, 10.0), (14.0, 18.0)),
            test_intervals=((-12.0, 22.0),),
            ood=True, surrogate_hidden=(100, 100, 100),
            teacher_hidden=(100, 100, 100)),
    }


TASK_IDS = tuple(_tasks().keys())


def task_by_id(task_id: str) -> TaskSpec:
    tasks = _tasks()
    key = task_id.strip().upper().replace("#", "")
    if key not in tasks:
        raise ValueError(f"unknown task id {task_id!r}; expected one of {TASK_IDS}")
    return tasks[key]


@dataclass
class ReplicateBundle:
    """All data for one task at one master seed."""

    task: TaskSpec
    train_sets: list[RegressionDataset]
    test: RegressionDataset
    latent_truth: np.ndarray            # noiseless f at the test inputs
    grid: np.ndarray                    # (n_grid, 1) even grid over test support
    seed: int
    teacher_params: np.ndarray | None = None
    quadratic_variant: bool = field(default=False)

    @property
    def n_replicates(self) -> int:
        return len(self.train_sets)


def uniform_union(rng: np.random.Generator, n: int,
                  intervals: tuple[Interval, ...]) -> np.ndarray:
    """n points uniform on a union of intervals (length-weighted mixture)."""
    lengths = np.array([hi - lo for lo, hi in intervals], dtype=np.float64)
    if (lengths <= 0).any():
        raise ValueError(f"degenerate interval in {intervals}")
    which = rng.choice(len(intervals), size=n, p=lengths / lengths.sum())
    u = rng.uniform(size=n)
    los = np.array([lo for lo, _ in intervals])
    return los[which] + u * lengths[which]


def latent_truth(task: TaskSpec, x: np.ndarray,
                 teacher_params: np.ndarray | None = None,
                 quadratic_variant: bool = False) -> np.ndarray:
    """Noiseless latent function values, shape (n,)."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    name = task.latent
    if name == "cubic" and quadratic_variant:
        name = "quadratic"
    if name == "cos2_sin":
        return np.cos(2.0 * x) + np.sin(x)
    if name == "cubic":
        return 0.1 * x ** 3
    if name == "quadratic":
        return 0.1 * x ** 2
    if name == "damped_sine":
        return -(1.0 + x) * np.sin(1.2 * x)
    if name == "teacher":
        if teacher_params is None:
            raise ValueError("teacher task needs the bundle's frozen teacher weights")
        arch = MlpArchitecture((1, *task.teacher_hidden, 1))
        return mlp_forward(arch, teacher_params, x[:, None]).reshape(-1)
    raise ValueError(f"unknown latent function {name!r}")


def _draw_train_inputs(task: TaskSpec, rng: np.random.Generator) -> np.ndarray:
    if task.pinned_inner:
        # first interval is the sparse inner region with a fixed head count;
        # the rest of the inputs come from the remaining intervals. Sample
        # order puts the pinned points last.
        outer = uniform_union(rng, task.n_train - task.pinned_inner,
                              task.train_intervals[1:])
        inner = uniform_union(rng, task.pinned_inner, task.train_intervals[:1])
        return np.concatenate([outer, inner])
    return uniform_union(rng, task.n_train, task.train_intervals)


def generate_bundle(task: TaskSpec | str, n_replicates: int, seed: int,
                    sigma: float | None = None, n_grid: int = 200,
                    quadratic_variant: bool = False) -> ReplicateBundle:
    """Generate a bundle; identical (task, n_replicates, seed) reproduce it.

    The test set and teacher depend only on (task, seed), so growing
    n_replicates extends a bundle without changing existing data.
    """
    if isinstance(task, str):
        task = task_by_id(task)
    if n_replicates < 1:
        raise ValueError("n_replicates must be >= 1")
    noise = task.sigma if sigma is None else float(sigma)
    if noise < 0:
        raise ValueError("sigma must be >= 0")

    root = np.random.SeedSequence(int(seed))
    teacher_ss, test_ss, *train_ss = root.spawn(n_replicates + 2)

    teacher_params = None
    if task.latent == "teacher":
        arch = MlpArchitecture((1, *task.teacher_hidden, 1))
        teacher_params = np.random.default_rng(teacher_ss).standard_normal(
            arch.param_count)

    def observe(x: np.ndarray, rng: np.random.Generator) -> RegressionDataset:
        f = latent_truth(task, x, teacher_params, quadratic_variant)
        y = f + noise * rng.standard_normal(len(x)) if noise > 0 else f.copy()
        return RegressionDataset(x[:, None], y[:, None])

    test_rng = np.random.default_rng(test_ss)
    x_test = uniform_union(test_rng, task.n_test, task.test_intervals)
    test = observe(x_test, test_rng)

    trains = []
    for ss in train_ss:
        rng = np.random.default_rng(ss)
        trains.append(observe(_draw_train_inputs(task, rng), rng))

    lo, hi = task.test_support
    grid = np.linspace(lo, hi, n_grid)[:, None]
    truth = latent_truth(task, x_test, teacher_params, quadratic_variant)
    return ReplicateBundle(task, trains, test, truth, grid, int(seed),
                           teacher_params, quadratic_variant)


def _write_xy_csv(path: Path, ds: RegressionDataset):
    with open(path, "w") as fh:
        cols = [f"x{i + 1}" for i in range(ds.x.shape[1])] + ["y"]
        fh.write(",".join(cols) + "\n")
        for xi, yi in zip(ds.x, ds.y):
            fh.write(",".join(repr(float(v)) for v in (*xi, *yi)) + "\n")


def _read_xy_csv(path: Path) -> RegressionDataset:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return RegressionDataset(rows[:, :-1], rows[:, -1:])


def save_bundle(bundle: ReplicateBundle, out_dir: str | Path) -> Path:
    """Write per-replicate CSVs, the test CSV, and a JSON manifest."""
    out = Path(out_dir) / bundle.task.task_id
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for k, ds in enumerate(bundle.train_sets):
        name = f"train_rep{k:03d}.csv"
        _write_xy_csv(out / name, ds)
        files.append(name)
    _write_xy_csv(out / "test.csv", bundle.test)
    if bundle.teacher_params is not None:
        bundle.teacher_params.astype("<f8").tofile(out / "teacher.bin")
    manifest = {
        "task": bundle.task.task_id,
        "seed": bundle.seed,
        "sigma": bundle.task.sigma,
        "n_train": bundle.task.n_train,
        "n_test": bundle.task.n_test,
        "n_replicates": bundle.n_replicates,
        "quadratic_variant": bundle.quadratic_variant,
        "train_files": files,
        "test_file": "test.csv",
        "teacher_file": "teacher.bin" if bundle.teacher_params is not None else None,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def load_bundle(task_dir: str | Path) -> ReplicateBundle:
    """Rebuild a bundle from save_bundle output."""
    task_dir = Path(task_dir)
    with open(task_dir / "manifest.json") as fh:
        manifest = json.load(fh)
    task = task_by_id(manifest["task"])
    trains = [_read_xy_csv(task_dir / f) for f in manifest["train_files"]]
    test = _read_xy_csv(task_dir / manifest["test_file"])
    teacher = None
    if manifest.get("teacher_file"):
        teacher = np.fromfile(task_dir / manifest["teacher_file"], dtype="<f8")
    quad = bool(manifest.get("quadratic_variant", False))
    truth = latent_truth(task, test.x, teacher, quad)
    lo, hi = task.test_support
    grid = np.linspace(lo, hi, 200)[:, None]
    return ReplicateBundle(task, trains, test, truth, grid,
                           int(manifest["seed"]), teacher, quad)
