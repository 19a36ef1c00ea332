"""Conditional expectile estimation and the expectile-based tail index.

The expectile estimate inverts the kernel survival ratio: it is the infimum
of {y : Gbar(y|x) <= 1 - alpha}, located by bisection on the interval where
the ratio is provably strictly decreasing. The tail index averages log
spacings of expectile estimates across nested extreme levels; a bias-reduced
variant rescales it using the local mean-to-expectile ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConvergenceError, NonPositiveExpectileError
from .kernels import KernelSpec
from .smoothing import LocalFit, Sample, local_fit

ROOT_TOL = 1e-10
ROOT_MAX_ITER = 200


def harmonic_taus(J: int) -> tuple[float, ...]:
    """The weight sequence 1, 1/2, ..., 1/J."""
    if J < 2:
        raise ValueError("J must be >= 2")
    return tuple(1.0 / j for j in range(1, J + 1))


def validate_taus(taus) -> tuple[float, ...]:
    taus = tuple(float(t) for t in taus)
    if len(taus) < 2:
        raise ValueError("need at least two weights (J >= 2)")
    if taus[0] != 1.0:
        raise ValueError("the first weight must equal 1")
    for a, b in zip(taus, taus[1:]):
        if not b < a:
            raise ValueError("weights must be strictly decreasing")
    if taus[-1] <= 0.0:
        raise ValueError("weights must be positive")
    return taus


@dataclass(frozen=True)
class TailConfig:
    """Levels, weights and bandwidth shared by the tail estimators."""

    alpha: float
    taus: tuple[float, ...]
    h: float
    k: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not self.h > 0:
            raise ValueError("bandwidth h must be positive")
        if self.k < 0:
            raise ValueError("moment order k must be nonnegative")
        object.__setattr__(self, "taus", validate_taus(self.taus))
        for t in self.taus:
            if not 0.0 < 1.0 - t * (1.0 - self.alpha) < 1.0:
                raise ValueError("levels 1 - tau_j (1 - alpha) must lie in (0, 1)")

    @property
    def J(self) -> int:
        return len(self.taus)

    @property
    def levels(self) -> tuple[float, ...]:
        return tuple(1.0 - t * (1.0 - self.alpha) for t in self.taus)


@dataclass(frozen=True)
class ExpectileEstimate:
    """Solver output: the estimate plus the bracket and iteration count."""

    value: float
    alpha: float
    x: tuple[float, ...]
    bracket: tuple[float, float]
    iterations: int


def _solve_expectile(fit: LocalFit, alpha: float) -> tuple[float, tuple[float, float], int]:
    ys = fit.responses
    y_min = float(ys.min())
    y_max = float(ys.max())
    if y_min == y_max:
        return y_min, (y_min, y_max), 0
    # Gbar is strictly decreasing on [m_hat, y_max); below the local mean it
    # stays above 1/2, so the bracket only needs to reach down to y_min when
    # alpha < 1/2.
    lo = fit.m_hat if alpha >= 0.5 else y_min
    root, iters, status = _backend.expectile_root(
        fit.weights, ys, 1.0 - alpha, lo, y_max, ROOT_TOL, ROOT_MAX_ITER
    )
    if status == _backend.STATUS_NO_CONVERGENCE:
        raise ConvergenceError(f"expectile bisection exceeded {ROOT_MAX_ITER} iterations")
    return root, (lo, y_max), iters


def expectile_hat(sample: Sample, spec: KernelSpec, h: float, alpha: float, x) -> ExpectileEstimate:
    """Conditional expectile estimate at level alpha and covariate point x."""
    if not 0.0 < float(alpha) < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    fit = local_fit(sample, spec, h, x)
    value, bracket, iters = _solve_expectile(fit, float(alpha))
    xt = tuple(np.asarray(x, dtype=float).reshape(-1))
    return ExpectileEstimate(value=value, alpha=float(alpha), x=xt, bracket=bracket, iterations=iters)


def empirical_weighted_expectile(weights, responses, alpha: float) -> float:
    """Weighted expectile by direct solution of the first-order condition.

    Solves alpha * sum w (y - t)_+ = (1 - alpha) * sum w (t - y)_+ by
    bisection. Kept independent of the survival-ratio inversion so the two
    routes can cross-check each other.
    """
    if not 0.0 < float(alpha) < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    w = np.asarray(weights, dtype=float).reshape(-1)
    y = np.asarray(responses, dtype=float).reshape(-1)
    if w.shape != y.shape:
        raise ValueError("weights and responses must have equal length")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    mask = w > 0
    if not np.any(mask):
        raise ValueError("weights must not all be zero")
    w, y = w[mask], y[mask]
    alpha = float(alpha)

    def foc(t: float) -> float:
        d = y - t
        return alpha * float(np.sum(w * np.maximum(d, 0.0))) - (1.0 - alpha) * float(
            np.sum(w * np.maximum(-d, 0.0))
        )

    lo, hi = float(y.min()), float(y.max())
    if lo == hi:
        return lo
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-13 * (1.0 + abs(mid)):
            break
        if foc(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class TailIndexFit:
    """Tail index estimates at one covariate point, with reusable parts."""

    gamma_hat: float
    gamma_tilde: float
    expectile: ExpectileEstimate  # at the base level alpha
    level_values: tuple[float, ...]  # expectile estimates at 1 - tau_j (1 - alpha)
    m_hat: float
    g_hat: float


def _log_spacing_index(level_values: tuple[float, ...], base: float, taus: tuple[float, ...]) -> float:
    if base <= 0.0 or any(v <= 0.0 for v in level_values):
        raise NonPositiveExpectileError("log spacings need positive expectile estimates")
    c = sum(math.log(1.0 / t) for t in taus)
    return sum(math.log(v) - math.log(base) for v in level_values) / c


def tail_index_from_locals(fit: LocalFit, alpha: float, taus, xt: tuple[float, ...]) -> TailIndexFit:
    """Tail index estimates from a precomputed local fit (shared by the
    level-selection loops, which sweep alpha at fixed x and h)."""
    taus = validate_taus(taus)
    if not 0.0 < float(alpha) < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    alpha = float(alpha)

    base_value, bracket, iters = _solve_expectile(fit, alpha)
    values = [base_value]
    for t in taus[1:]:
        level = 1.0 - t * (1.0 - alpha)
        values.append(_solve_expectile(fit, level)[0])

    g_hat = _log_spacing_index(tuple(values), base_value, taus)
    c = sum(math.log(1.0 / t) for t in taus)
    correction = 1.0 - fit.m_hat * sum(t**g_hat - 1.0 for t in taus) / (base_value * c)
    return TailIndexFit(
        gamma_hat=g_hat,
        gamma_tilde=g_hat * correction,
        expectile=ExpectileEstimate(base_value, alpha, xt, bracket, iters),
        level_values=tuple(values),
        m_hat=fit.m_hat,
        g_hat=fit.g_hat,
    )


def tail_index_fit(sample: Sample, spec: KernelSpec, h: float, alpha: float, taus, x) -> TailIndexFit:
    """Solve the J expectile levels once and assemble both index estimates."""
    fit = local_fit(sample, spec, h, x)
    xt = tuple(np.asarray(x, dtype=float).reshape(-1))
    return tail_index_from_locals(fit, alpha, taus, xt)


def gamma_hat(sample: Sample, spec: KernelSpec, h: float, alpha: float, taus, x) -> float:
    """Expectile-based log-spacing estimate of the conditional tail index."""
    return tail_index_fit(sample, spec, h, alpha, taus, x).gamma_hat


def gamma_tilde(sample: Sample, spec: KernelSpec, h: float, alpha: float, taus, x) -> float:
    """Bias-reduced tail index: gamma_hat times the local mean correction."""
    return tail_index_fit(sample, spec, h, alpha, taus, x).gamma_tilde
