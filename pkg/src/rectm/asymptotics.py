"""Closed-form asymptotic variance/bias quantities for the tail estimators,
and the pointwise Gaussian confidence intervals built from them.

Entry conventions, writing g for the tail index, c = sum_j log(1/tau_j):

  Lambda11 = 2g/(1-2g)
  Lambda12 = (sum_{j>=2} tau_j^-g - (J-1)) / ((1-2g) c)
  Lambda22 = [ 2/(1-2g) ((J-1)^2 (1-g) + g sum_{j>=2} 1/tau_j
               + (1-J) sum_{j>=2} tau_j^-g)
               + 2 1{J>2} sum_{2<=j<l<=J} (1/tau_j)((tau_l/tau_j)^-g/(1-2g) - 1)
             ] / c^2
  V11 = 2k^2 g/(1-2g) + 2k^2 Lambda12/(1-kg) + (k/(1-kg))^2 Lambda22
  V12 = 2kg/(1-2g) + k Lambda12/(1-kg)
  V22 = 2g/(1-2g)
  bias = g sum_j (tau_j^g - 1) / c
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .expectiles import validate_taus
from .kernels import KernelSpec


@dataclass(frozen=True)
class AsymptoticSpec:
    """Validated inputs for the variance evaluators: index, weights, order."""

    gamma: float
    taus: tuple[float, ...]
    k: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "taus", validate_taus(self.taus))
        if not 0.0 < self.gamma < 0.5:
            raise ValueError("gamma must lie in (0, 1/2)")
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.k * self.gamma >= 1.0:
            raise ValueError("need k * gamma < 1")

    @property
    def J(self) -> int:
        return len(self.taus)


class LambdaEntries(NamedTuple):
    lambda11: float
    lambda12: float
    lambda22: float


class VEntries(NamedTuple):
    v11: float
    v12: float
    v22: float


def _log_weight_sum(taus: tuple[float, ...]) -> float:
    return sum(math.log(1.0 / t) for t in taus)


def _lambda22_raw(gamma: float, taus: tuple[float, ...]) -> float:
    J = len(taus)
    c = _log_weight_sum(taus)
    one_m2g = 1.0 - 2.0 * gamma
    tail = taus[1:]
    main = (2.0 / one_m2g) * (
        (J - 1) ** 2 * (1.0 - gamma)
        + gamma * sum(1.0 / t for t in tail)
        + (1 - J) * sum(t**-gamma for t in tail)
    )
    cross = 0.0
    if J > 2:
        for j in range(1, J - 1):
            for l in range(j + 1, J):
                cross += (1.0 / taus[j]) * ((taus[l] / taus[j]) ** -gamma / one_m2g - 1.0)
    return (main + 2.0 * cross) / c**2


def lambda_matrix(spec: AsymptoticSpec) -> LambdaEntries:
    """Entries of the joint expectile/tail-index limiting covariance."""
    g = spec.gamma
    c = _log_weight_sum(spec.taus)
    l11 = 2.0 * g / (1.0 - 2.0 * g)
    l12 = (sum(t**-g for t in spec.taus[1:]) - (spec.J - 1)) / ((1.0 - 2.0 * g) * c)
    return LambdaEntries(l11, l12, _lambda22_raw(g, spec.taus))


def v_matrix(spec: AsymptoticSpec) -> VEntries:
    """Entries of the joint tail-moment/expectile limiting covariance."""
    g, k = spec.gamma, spec.k
    l11, l12, l22 = lambda_matrix(spec)
    denom = 1.0 - k * g
    v11 = k * k * l11 + 2.0 * k * k * l12 / denom + (k / denom) ** 2 * l22
    v12 = k * l11 + k * l12 / denom
    return VEntries(v11, v12, l11)


def bias_term(spec: AsymptoticSpec) -> float:
    """Asymptotic bias factor of the log-spacing index (negative for g > 0)."""
    g = spec.gamma
    return g * sum(t**g - 1.0 for t in spec.taus) / _log_weight_sum(spec.taus)


def lambda22_plugin(gamma: float, taus) -> float:
    """Lambda22 evaluated at an *estimated* index, without the g < 1/2 gate.

    Plug-in estimates can exceed 1/2, in which case this goes negative and
    the interval construction reports a no-interval outcome instead of a CI.
    """
    taus = validate_taus(taus)
    if gamma == 0.5:
        return math.inf
    return _lambda22_raw(float(gamma), taus)


# Inverse standard normal CDF: rational initial guess (Acklam's coefficients)
# polished by one Halley step on erfc. Absolute error well below 1e-8.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


def gaussian_quantile(p: float) -> float:
    """Quantile of the standard normal law."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if p < 0.02425:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    elif p <= 0.97575:
        q = p - 0.5
        r = q * q
        x = (
            (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5])
            * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
        )
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    # Halley refinement against the exact CDF
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


@dataclass(frozen=True)
class ConfidenceInterval:
    """Pointwise interval outcome; bounds are None unless status is 'ok'.

    status is one of 'ok', 'no-interval' (negative variance estimate) or
    'unbounded' (the lower denominator crossed zero).
    """

    lo: float | None
    hi: float | None
    status: str
    scale: float = float("nan")
    z: float = float("nan")

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def confidence_interval(
    rectm_w,
    gamma: float,
    g_hat: float,
    n: int,
    h: float,
    p: int,
    alpha: float,
    beta: float,
    theta: float,
    kernel: KernelSpec,
    lambda22_hat: float,
) -> ConfidenceInterval:
    """(1 - theta) interval for an extrapolated tail-moment estimate.

    rectm_w supplies .value and .k. The half-width enters multiplicatively:
    bounds are value/(1 +- z s) with
    s = k ||K||_2 |gamma| log((1-alpha)/(1-beta)) sqrt(lambda22_hat)
        / sqrt(n h^p (1-alpha) g_hat).
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    if not 0.0 < alpha <= beta < 1.0:
        raise ValueError("need 0 < alpha <= beta < 1")
    if not (h > 0 and n >= 1 and g_hat > 0):
        raise ValueError("need h > 0, n >= 1 and a positive density estimate")
    if lambda22_hat < 0.0:
        return ConfidenceInterval(None, None, "no-interval")
    value = float(rectm_w.value)
    z = gaussian_quantile(1.0 - theta / 2.0)
    s = (
        float(rectm_w.k)
        * kernel.l2_norm
        * abs(float(gamma))
        * math.log((1.0 - alpha) / (1.0 - beta))
        * math.sqrt(lambda22_hat)
        / math.sqrt(n * h**p * (1.0 - alpha) * g_hat)
    )
    lo = value / (1.0 + z * s)
    if 1.0 - z * s <= 0.0:
        return ConfidenceInterval(lo, None, "unbounded", scale=s, z=z)
    return ConfidenceInterval(lo, value / (1.0 - z * s), "ok", scale=s, z=z)
