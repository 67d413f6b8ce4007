from .compare import picp_mcp_comparison, write_comparison_csv
from .config import (ALGORITHMS, ExperimentConfig, GridSpec, HmcProfile,
                     default_grids, profile, step_grid)
from .io import (hp_string, parse_hp_string, read_csv, read_matrix_csv,
                 write_csv)
from .runner import ReplicateAborted, run_benchmark
from .seeding import derive_seed

__all__ = [
    "ALGORITHMS", "ExperimentConfig", "GridSpec", "HmcProfile",
    "ReplicateAborted", "default_grids", "derive_seed", "hp_string",
    "parse_hp_string", "picp_mcp_comparison", "profile", "read_csv",
    "read_matrix_csv", "run_benchmark", "step_grid", "write_comparison_csv",
    "write_csv",
]
