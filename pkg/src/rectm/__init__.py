"""Semi-parametric estimation of expectile-based conditional tail moments
for heavy-tailed responses with covariates.

Core entry points: kernel smoothing primitives (`smoothing`), conditional
expectiles and the tail index (`expectiles`), tail-moment estimators
(`tail_moments`), their limiting variances and intervals (`asymptotics`),
cross-validated tuning (`selection`), the Burr ground-truth oracle (`burr`)
and the replication harness (`simulation`). The hot loops are numba-compiled
by default; set RECTM_BACKEND=numpy for the pure-numpy fallback.
"""

from ._backend import BACKEND
from .asymptotics import (
    AsymptoticSpec,
    ConfidenceInterval,
    bias_term,
    confidence_interval,
    gaussian_quantile,
    lambda22_plugin,
    lambda_matrix,
    v_matrix,
)
from .burr import BURR, BurrOracle, burr_sample, true_expectile, true_quantile, true_rectm
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DataError,
    DegeneratePointError,
    EmptyNeighborhoodError,
    MomentExistenceError,
    NonPositiveExpectileError,
    OracleError,
    RectmError,
    SelectionError,
)
from .expectiles import (
    ExpectileEstimate,
    TailConfig,
    TailIndexFit,
    empirical_weighted_expectile,
    expectile_hat,
    gamma_hat,
    gamma_tilde,
    harmonic_taus,
    tail_index_fit,
)
from .kernels import KernelSpec, biquadratic_kernel, kernel_by_name, kernel_eval, kernel_l2norm_sq, uniform_kernel
from .selection import ScoreEntry, SelectionGrid, cv_alpha, cv_bandwidth
from .simulation import ReplicationReport, SimulationConfig, export_report, run_simulation, summarize
from .smoothing import (
    Sample,
    SmoothingDiagnostics,
    conditional_mean_estimate,
    density_estimate,
    gbar_estimate,
    kernel_weights,
    loo_survival,
    psi_estimate,
)
from .tail_moments import RectmEstimate, rectm_plugin, rectm_weissman

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AsymptoticSpec",
    "BURR",
    "BurrOracle",
    "ConfidenceInterval",
    "ConfigurationError",
    "ConvergenceError",
    "DataError",
    "DegeneratePointError",
    "EmptyNeighborhoodError",
    "ExpectileEstimate",
    "KernelSpec",
    "MomentExistenceError",
    "NonPositiveExpectileError",
    "OracleError",
    "RectmError",
    "RectmEstimate",
    "ReplicationReport",
    "Sample",
    "ScoreEntry",
    "SelectionError",
    "SelectionGrid",
    "SimulationConfig",
    "SmoothingDiagnostics",
    "TailConfig",
    "TailIndexFit",
    "bias_term",
    "biquadratic_kernel",
    "burr_sample",
    "conditional_mean_estimate",
    "confidence_interval",
    "cv_alpha",
    "cv_bandwidth",
    "density_estimate",
    "empirical_weighted_expectile",
    "expectile_hat",
    "export_report",
    "gamma_hat",
    "gamma_tilde",
    "gaussian_quantile",
    "gbar_estimate",
    "harmonic_taus",
    "kernel_by_name",
    "kernel_eval",
    "kernel_l2norm_sq",
    "kernel_weights",
    "lambda22_plugin",
    "lambda_matrix",
    "loo_survival",
    "psi_estimate",
    "rectm_plugin",
    "rectm_weissman",
    "run_simulation",
    "summarize",
    "tail_index_fit",
    "true_expectile",
    "true_quantile",
    "true_rectm",
    "uniform_kernel",
    "v_matrix",
]
