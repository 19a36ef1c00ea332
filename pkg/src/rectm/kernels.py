"""Kernel profiles used for the local smoothing weights.

A kernel is a density on R^p supported in the unit ball (Euclidean norm).
Built-ins are radial: profile(u) = norm_const * shape(||u||), with the
normalizing constant chosen so the profile integrates to one in dimension p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from . import _backend


@dataclass(frozen=True)
class KernelSpec:
    """A kernel density profile together with its precomputed constants.

    profile maps points u of shape (p,) or batches (m, p) to density values;
    it must vanish outside the ball of support_radius. l2_norm_sq is the
    integral of profile squared over R^p.
    """

    name: str
    dim: int
    profile: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    l2_norm_sq: float
    # set for built-in kernels so the compiled loops can evaluate them
    kid: int | None = field(default=None, repr=False)
    norm_const: float = field(default=float("nan"), repr=False)

    @property
    def l2_norm(self) -> float:
        return float(np.sqrt(self.l2_norm_sq))


def _radial_profile(shape_fn: Callable[[np.ndarray], np.ndarray], norm_const: float):
    def profile(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if not np.all(np.isfinite(u)):
            raise ValueError("kernel argument must be finite")
        r = np.sqrt(np.sum(np.atleast_2d(u) ** 2, axis=1))
        out = np.where(r <= 1.0, shape_fn(r) * norm_const, 0.0)
        return out if u.ndim > 1 else float(out[0])

    return profile


def _unit_ball_volume(p: int) -> float:
    return float(np.pi ** (p / 2) / special.gamma(p / 2 + 1))


def biquadratic_kernel(p: int = 1) -> KernelSpec:
    """The (1 - ||u||^2)^2 bell on the unit ball, normalized for dimension p.

    For p = 1 this is K(u) = 15/16 (1 - u^2)^2 on |u| <= 1 with
    ||K||_2^2 = 5/7. Only p = 1 is exercised by the estimation workflows;
    higher p reuses the same radial shape renormalized to a density.
    """
    if p < 1:
        raise ValueError("dimension must be >= 1")
    half = p / 2
    norm_const = float(special.gamma(half) / (np.pi**half * special.beta(half, 3)))
    l2 = float(norm_const**2 * np.pi**half * special.beta(half, 5) / special.gamma(half))
    return KernelSpec(
        name="biquadratic",
        dim=p,
        profile=_radial_profile(lambda r: (1.0 - r * r) ** 2, norm_const),
        support_radius=1.0,
        l2_norm_sq=l2,
        kid=_backend.KID_BIQUADRATIC,
        norm_const=norm_const,
    )


def uniform_kernel(p: int = 1) -> KernelSpec:
    """Constant density on the unit ball (1/2 on [-1, 1] for p = 1)."""
    if p < 1:
        raise ValueError("dimension must be >= 1")
    c = 1.0 / _unit_ball_volume(p)
    return KernelSpec(
        name="uniform",
        dim=p,
        profile=_radial_profile(lambda r: np.ones_like(r), c),
        support_radius=1.0,
        l2_norm_sq=c,
        kid=_backend.KID_UNIFORM,
        norm_const=c,
    )


_BUILTINS = {"biquadratic": biquadratic_kernel, "uniform": uniform_kernel}


def kernel_by_name(name: str, p: int = 1) -> KernelSpec:
    try:
        return _BUILTINS[name](p)
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; available: {sorted(_BUILTINS)}") from None


def kernel_eval(spec: KernelSpec, u) -> float:
    """Evaluate the kernel profile at a single point u."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape[0] != spec.dim:
        raise ValueError(f"expected a point of dimension {spec.dim}, got {u.shape[0]}")
    if not np.all(np.isfinite(u)):
        raise ValueError("kernel argument must be finite")
    return float(spec.profile(u.reshape(1, -1))[0])


def kernel_l2norm_sq(spec: KernelSpec) -> float:
    """Squared L2 norm of the kernel profile."""
    if not spec.l2_norm_sq > 0:
        raise ValueError("kernel spec carries a non-positive l2_norm_sq")
    return float(spec.l2_norm_sq)
