"""Raw kernel estimators: density, local mean, censored tail moments, and
the survival ratio whose level sets define conditional expectiles.

All estimators are pure functions of (sample, kernel, bandwidth, point);
they share the local weight vector w_i = K((x - X_i)/h)/h^p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import DegeneratePointError, EmptyNeighborhoodError
from .kernels import KernelSpec


@dataclass(frozen=True)
class Sample:
    """Paired observations (covariates, responses); the estimation substrate.

    covariates has shape (n, p); a 1-d array is promoted to a single column.
    Responses may be negative. Non-finite entries are rejected.
    """

    covariates: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        X = np.ascontiguousarray(np.atleast_1d(np.asarray(self.covariates, dtype=float)))
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise ValueError("covariates must be an (n, p) matrix")
        y = np.ascontiguousarray(np.asarray(self.responses, dtype=float).reshape(-1))
        if X.shape[0] != y.shape[0]:
            raise ValueError("covariates and responses disagree on n")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("need n >= 1 and p >= 1")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("sample contains non-finite entries")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "covariates", X)
        object.__setattr__(self, "responses", y)

    @property
    def n(self) -> int:
        return self.covariates.shape[0]

    @property
    def p(self) -> int:
        return self.covariates.shape[1]


@dataclass
class SmoothingDiagnostics:
    """Counters for silently-handled degeneracies (leave-one-out fallbacks)."""

    empty_loo_count: int = 0


class LocalFit(NamedTuple):
    """In-support slice of the sample at a target point, with weight sums."""

    weights: np.ndarray  # positive kernel weights only
    responses: np.ndarray  # matching responses
    sum_w: float
    g_hat: float
    m_hat: float


def _as_point(x, p: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != p:
        raise ValueError(f"x must have dimension {p}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    return x


def _check_h(h: float) -> float:
    h = float(h)
    if not (np.isfinite(h) and h > 0):
        raise ValueError("bandwidth h must be positive")
    return h


def kernel_weights(sample: Sample, spec: KernelSpec, h: float, x) -> np.ndarray:
    """Vector of K((x - X_i)/h)/h^p over the sample."""
    h = _check_h(h)
    x = _as_point(x, sample.p)
    if spec.kid is not None:
        scale = spec.norm_const / h**sample.p
        return _backend.weights_radial(sample.covariates, x, h, spec.kid, scale)
    vals = spec.profile((x[np.newaxis, :] - sample.covariates) / h)
    return np.asarray(vals, dtype=float) / h**sample.p


def local_fit(sample: Sample, spec: KernelSpec, h: float, x) -> LocalFit:
    """Weights, responses and weighted mean restricted to the support of x.

    Raises EmptyNeighborhoodError when no observation falls within radius h.
    """
    w = kernel_weights(sample, spec, h, x)
    mask = w > 0.0
    if not np.any(mask):
        raise EmptyNeighborhoodError(f"no observation within bandwidth {h} of x={x}")
    ws = w[mask]
    ys = sample.responses[mask]
    sum_w = float(np.sum(ws))
    return LocalFit(ws, ys, sum_w, sum_w / sample.n, float(ws @ ys / sum_w))


def density_estimate(sample: Sample, spec: KernelSpec, h: float, x) -> float:
    """Kernel density estimate of the covariate law at x."""
    w = kernel_weights(sample, spec, h, x)
    return float(np.sum(w)) / sample.n


def conditional_mean_estimate(sample: Sample, spec: KernelSpec, h: float, x) -> float:
    """Locally weighted mean of the response at x."""
    return local_fit(sample, spec, h, x).m_hat


def psi_estimate(sample: Sample, spec: KernelSpec, h: float, k: float, y: float, x) -> float:
    """Censored moment estimate: average of w_i (Y_i - y)^k over Y_i > y."""
    h = _check_h(h)
    if k < 0:
        raise ValueError("moment order k must be nonnegative")
    w = kernel_weights(sample, spec, h, x)
    return _backend.psi_sum(w, sample.responses, float(y), float(k)) / sample.n


def gbar_estimate(sample: Sample, spec: KernelSpec, h: float, y: float, x) -> float:
    """Survival ratio psi1 / (2 psi1 + (y - m) g) at the point (y, x).

    Equals 1/2 at the local mean, decreases to 0 at the largest in-support
    response. Raises DegeneratePointError when every local response ties
    with y (the 0/0 case).
    """
    fit = local_fit(sample, spec, h, x)
    y = float(y)
    s1 = _backend.psi_sum(fit.weights, fit.responses, y, 1.0)
    denom = 2.0 * s1 + (y - fit.m_hat) * fit.sum_w
    if s1 == 0.0 and denom == 0.0:
        raise DegeneratePointError("all in-support responses coincide with y")
    return s1 / denom


def loo_survival(
    sample: Sample,
    spec: KernelSpec,
    h: float,
    y: float,
    x,
    exclude_index: int,
    diagnostics: SmoothingDiagnostics | None = None,
) -> float:
    """Leave-one-out kernel exceedance frequency at (y, x), skipping one row.

    An empty leave-one-out neighborhood yields 0.0 and bumps the diagnostics
    counter instead of raising, so cross-validation sums stay finite.
    """
    i = int(exclude_index)
    if not 0 <= i < sample.n:
        raise ValueError("exclude_index out of range")
    w = kernel_weights(sample, spec, h, x)
    w = w.copy()
    w[i] = 0.0
    total = float(np.sum(w))
    if total <= 0.0:
        if diagnostics is not None:
            diagnostics.empty_loo_count += 1
        return 0.0
    return float(np.sum(w[sample.responses > y])) / total
