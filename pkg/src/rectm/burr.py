"""Ground truth for tests and simulations: a Burr response whose tail index
varies smoothly with a uniform covariate.

Conditional survival: S(y|x) = (1 + y^(1/gamma(x)))^-1 for y > 0, with
gamma(x) = 1/4 + sin(2 pi x)/20 by default. All population quantities are
computed by adaptive quadrature in the survival variable v = S(y|x), whose
inverse is y = ((1-v)/v)^gamma(x); this maps the heavy tail onto (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import MomentExistenceError, OracleError
from .smoothing import Sample

QUAD_KW = dict(epsabs=1e-12, epsrel=1e-11, limit=400)


def sinusoidal_gamma(x):
    """Tail index profile 1/4 + sin(2 pi x)/20, ranging over [0.2, 0.3]."""
    return 0.25 + np.sin(2.0 * np.pi * np.asarray(x, dtype=float)) / 20.0


def _scalar_x(x) -> float:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape[0] != 1:
        raise ValueError("the Burr oracle is univariate in x")
    return float(arr[0])


def _quad(f, a: float, b: float) -> float:
    val, err = quad(f, a, b, **QUAD_KW)
    if not np.isfinite(val) or err > 1e-7 * (1.0 + abs(val)):
        raise OracleError(f"quadrature failed on [{a}, {b}] (err={err:.2e})")
    return val


@dataclass(frozen=True)
class BurrOracle:
    """Closed-form and quadrature access to the Burr ground truth.

    rho is the second-order regular-variation parameter of this family in
    the quantile-scale convention; it only calibrates expected convergence
    rates in tests and never enters an estimator.
    """

    gamma_fn: Callable = field(default=sinusoidal_gamma)
    rho: float = -1.0

    def gamma(self, x) -> float:
        return float(self.gamma_fn(_scalar_x(x)))

    # -- distribution ------------------------------------------------------

    def survival(self, y, x) -> float:
        g = self.gamma(x)
        y = float(y)
        if y <= 0.0:
            return 1.0
        return 1.0 / (1.0 + y ** (1.0 / g))

    def quantile(self, alpha: float, x) -> float:
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        g = self.gamma(x)
        return (alpha / (1.0 - alpha)) ** g

    def inverse_survival(self, v: float, x) -> float:
        g = self.gamma(x)
        return ((1.0 - v) / v) ** g

    def sample(self, n: int, seed) -> Sample:
        """n iid pairs; X uniform on [0,1], Y by inverse-transform sampling."""
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = np.random.default_rng(seed)
        x = rng.uniform(size=n)
        u = rng.uniform(size=n)
        g = np.asarray(self.gamma_fn(x), dtype=float)
        y = (1.0 / (1.0 - u) - 1.0) ** g
        return Sample(x, y)

    # -- population functionals (quadrature in v = survival level) ---------

    def conditional_mean(self, x) -> float:
        g = self.gamma(x)
        if g >= 1.0:
            raise MomentExistenceError("mean requires gamma < 1")
        return _quad(lambda v: ((1.0 - v) / v) ** g, 0.0, 1.0)

    def _upper_partial(self, e: float, x) -> float:
        """E[(Y - e)_+ | x] for e > 0."""
        g = self.gamma(x)
        s = self.survival(e, x)
        return _quad(lambda v: ((1.0 - v) / v) ** g - e, 0.0, s)

    def _lower_partial(self, e: float, x) -> float:
        """E[(e - Y)_+ | x] for e > 0."""
        g = self.gamma(x)
        s = self.survival(e, x)
        return _quad(lambda v: e - ((1.0 - v) / v) ** g, s, 1.0)

    def expectile(self, alpha: float, x) -> float:
        """Population conditional expectile, solved from its first-order
        condition alpha E[(Y-e)_+] = (1-alpha) E[(e-Y)_+]."""
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.gamma(x) >= 1.0:
            raise MomentExistenceError("expectiles require gamma < 1")

        def foc(e: float) -> float:
            return alpha * self._upper_partial(e, x) - (1.0 - alpha) * self._lower_partial(e, x)

        lo = hi = self.quantile(alpha, x)
        for _ in range(200):
            if foc(lo) > 0.0:
                break
            lo /= 4.0
        else:
            raise OracleError("failed to bracket the expectile from below")
        for _ in range(200):
            if foc(hi) < 0.0:
                break
            hi *= 4.0
        else:
            raise OracleError("failed to bracket the expectile from above")
        return float(brentq(foc, lo, hi, xtol=1e-12, rtol=8.9e-16))

    def tail_moment(self, k: float, threshold: float, x) -> float:
        """E[Y^k 1{Y > threshold} | x]."""
        g = self.gamma(x)
        if k < 0:
            raise ValueError("k must be nonnegative")
        if k * g >= 1.0:
            raise MomentExistenceError(f"k*gamma = {k * g:.3f} >= 1")
        s = self.survival(threshold, x)
        kg = k * g
        return _quad(lambda v: v**-kg * (1.0 - v) ** kg, 0.0, s)

    def rectm(self, k: float, alpha: float, x) -> float:
        """E[Y^k | Y > e(alpha|x), x]: the target tail moment."""
        if k == 0:
            return 1.0
        e = self.expectile(alpha, x)
        s = self.survival(e, x)
        return self.tail_moment(k, e, x) / s

    def gbar(self, y: float, x) -> float:
        """Population survival ratio whose level sets are the expectiles."""
        up = self._upper_partial(float(y), x)
        m = self.conditional_mean(x)
        return up / (2.0 * up + (float(y) - m))

    def moment_ratio_excess(self, k: float, t: float, x) -> float:
        """E[Y^k | Y > t, x] / t^k minus its tail limit 1/(1 - k gamma).

        Computed in a cancellation-free form so the excess stays accurate
        even when it is far below float resolution of the ratio itself:
        with s = S(t|x),

          excess = ((1-s)^(-k g) - 1)/(1 - k g)
                   + s^(k g - 1) (1-s)^(-k g) * I(s),
          I(s) = integral_0^s v^(-k g) ((1-v)^(k g) - 1) dv.
        """
        g = self.gamma(x)
        kg = k * g
        if kg >= 1.0:
            raise MomentExistenceError(f"k*gamma = {kg:.3f} >= 1")
        s = self.survival(t, x)
        lead = math.expm1(-kg * math.log1p(-s)) / (1.0 - kg)
        corr = _quad(lambda v: v**-kg * math.expm1(kg * math.log1p(-v)), 0.0, s)
        return lead + s ** (kg - 1.0) * (1.0 - s) ** -kg * corr

    def moment_ratio(self, k: float, t: float, x) -> float:
        """E[Y^k | Y > t, x] / t^k."""
        return 1.0 / (1.0 - k * self.gamma(x)) + self.moment_ratio_excess(k, t, x)


BURR = BurrOracle()


def burr_sample(n: int, seed, oracle: BurrOracle = BURR) -> Sample:
    """Draw n pairs from the Burr model; bit-reproducible given the seed."""
    return oracle.sample(n, seed)


def true_quantile(alpha: float, x, oracle: BurrOracle = BURR) -> float:
    """Closed-form conditional quantile (alpha/(1-alpha))^gamma(x)."""
    return oracle.quantile(alpha, x)


def true_expectile(alpha: float, x, oracle: BurrOracle = BURR) -> float:
    """Population conditional expectile by quadrature and root search."""
    return oracle.expectile(alpha, x)


def true_rectm(k: float, alpha: float, x, oracle: BurrOracle = BURR) -> float:
    """Population expectile-based conditional tail moment by quadrature."""
    return oracle.rectm(k, alpha, x)
