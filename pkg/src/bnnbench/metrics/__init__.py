from .coverage import (band_indicators, coverage_summary, picp,
                       predictive_band, q2)
from .kernels import ImqKernel, energy_kernel, median_heuristic
from .ksd import ksd_imq, score_from_target
from .mds import MdsResult, classical_mds
from .mmd import mmd_energy, mmd_matrix
from .thinning import mmd_thin, thin_samples

__all__ = [
    "ImqKernel", "MdsResult", "band_indicators", "classical_mds",
    "coverage_summary", "energy_kernel", "ksd_imq", "median_heuristic",
    "mmd_energy", "mmd_matrix", "mmd_thin", "picp", "predictive_band", "q2",
    "score_from_target", "thin_samples",
]
