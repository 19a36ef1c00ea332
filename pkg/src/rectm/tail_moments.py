"""Plug-in and extrapolated estimators of the expectile-based conditional
tail moment E[Y^k | Y > e(level|x), X = x].

The plug-in form is e_hat^k / (1 - k * gamma_tilde); the extrapolated form
shifts it from an intermediate level alpha to an extreme level beta through
the factor ((1 - alpha)/(1 - beta))^(k * gamma_tilde).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MomentExistenceError
from .expectiles import expectile_hat, tail_index_fit, validate_taus
from .kernels import KernelSpec
from .smoothing import Sample


@dataclass(frozen=True)
class RectmEstimate:
    """A conditional tail moment estimate and the pieces it was built from."""

    value: float
    k: float
    level: float
    gamma_used: float
    expectile_used: float
    extrapolated: bool = False
    extrapolation_factor: float = 1.0


def _power(base: float, k: float) -> float:
    if base < 0.0 and k != int(k):
        raise ValueError("fractional moment of a negative expectile is undefined")
    return float(base) ** k


def rectm_plugin(
    sample: Sample,
    spec: KernelSpec,
    h: float,
    alpha: float,
    taus,
    k: float,
    x,
    gamma_value: float | None = None,
) -> RectmEstimate:
    """Tail moment estimate at level alpha via the tail-index plug-in.

    gamma_value, when given, is used in place of the bias-reduced index
    estimate (the selection, interval and property tests inject it to avoid
    recomputation or to pin the index).
    """
    k = float(k)
    if k < 0:
        raise ValueError("moment order k must be nonnegative")
    if gamma_value is None:
        fit = tail_index_fit(sample, spec, h, alpha, taus, x)
        gamma = fit.gamma_tilde
        e_alpha = fit.expectile.value
    else:
        validate_taus(taus)
        gamma = float(gamma_value)
        e_alpha = expectile_hat(sample, spec, h, alpha, x).value
    if k > 0 and k * gamma >= 1.0:
        raise MomentExistenceError(f"k*gamma = {k * gamma:.4f} >= 1: tail moment does not exist")
    value = _power(e_alpha, k) / (1.0 - k * gamma)
    return RectmEstimate(value=value, k=k, level=float(alpha), gamma_used=gamma, expectile_used=e_alpha)


def rectm_weissman(
    sample: Sample,
    spec: KernelSpec,
    h: float,
    alpha: float,
    beta: float,
    taus,
    k: float,
    x,
    gamma_value: float | None = None,
) -> RectmEstimate:
    """Extrapolate the plug-in tail moment from level alpha out to beta."""
    alpha = float(alpha)
    beta = float(beta)
    if not alpha <= beta < 1.0:
        raise ValueError("need alpha <= beta < 1")
    base = rectm_plugin(sample, spec, h, alpha, taus, k, x, gamma_value=gamma_value)
    factor = ((1.0 - alpha) / (1.0 - beta)) ** (float(k) * base.gamma_used)
    return RectmEstimate(
        value=base.value * factor,
        k=base.k,
        level=beta,
        gamma_used=base.gamma_used,
        expectile_used=base.expectile_used,
        extrapolated=True,
        extrapolation_factor=factor,
    )
