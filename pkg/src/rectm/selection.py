"""Data-driven choice of the bandwidth h and the threshold level alpha.

The bandwidth minimizes a leave-one-out survival cross-validation score over
a fixed grid; the level minimizes the squared discrepancy between the
bias-reduced tail index computed with two and with three harmonic weights
at a handful of probe points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import RectmError, SelectionError
from .expectiles import harmonic_taus, tail_index_from_locals
from .kernels import KernelSpec
from .smoothing import Sample, kernel_weights, local_fit

DEFAULT_H_RANGE = (0.05, 0.5)
DEFAULT_ALPHA_RANGE = (0.9, 0.96)
DEFAULT_GRID_SIZE = 20
DEFAULT_PROBE_COUNT = 9


class ScoreEntry(NamedTuple):
    """One grid candidate: its value, its score, and a diagnostics count."""

    value: float
    score: float
    diagnostics: int


@dataclass(frozen=True)
class SelectionGrid:
    """Candidate grids for the two selectors, plus optional probe points."""

    h_values: tuple[float, ...] = tuple(np.linspace(*DEFAULT_H_RANGE, DEFAULT_GRID_SIZE))
    alpha_values: tuple[float, ...] = tuple(np.linspace(*DEFAULT_ALPHA_RANGE, DEFAULT_GRID_SIZE))
    x_probe_points: tuple[float, ...] | None = None

    def __post_init__(self):
        for name, vals, lo, hi in (
            ("h_values", self.h_values, 0.0, np.inf),
            ("alpha_values", self.alpha_values, 0.0, 1.0),
        ):
            vals = tuple(float(v) for v in vals)
            if len(vals) == 0:
                raise ValueError(f"{name} must be non-empty")
            if any(not lo < v < hi for v in vals):
                raise ValueError(f"{name} out of range")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be strictly increasing")
            object.__setattr__(self, name, vals)


def _canonical_sort(sample: Sample) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sort rows by (Y, X) so score accumulation order is data-intrinsic."""
    keys = tuple(sample.covariates[:, d] for d in reversed(range(sample.p)))
    order = np.lexsort(keys + (sample.responses,))
    Xs = np.ascontiguousarray(sample.covariates[order])
    Ys = np.ascontiguousarray(sample.responses[order])
    pos_gt = np.searchsorted(Ys, Ys, side="right").astype(np.int64)
    return Xs, Ys, pos_gt


def _cv_score_generic(sample: Sample, spec: KernelSpec, Xs, Ys, pos_gt, h: float):
    # custom-profile kernels bypass the compiled loops
    n = Ys.shape[0]
    score = 0.0
    empties = 0
    suffix = np.empty(n + 1)
    sorted_sample = Sample(Xs, Ys)
    for i in range(n):
        w = kernel_weights(sorted_sample, spec, h, Xs[i])
        w = w.copy()
        w[i] = 0.0
        total = float(np.sum(w))
        ind = (Ys[i] >= Ys).astype(float)
        if total <= 0.0:
            empties += n
            score += float(np.sum(ind))
            continue
        suffix[n] = 0.0
        suffix[:n] = np.cumsum(w[::-1])[::-1]
        d = ind - suffix[pos_gt] / total
        score += float(np.sum(d * d))
    return score, empties


def cv_bandwidth(
    sample: Sample,
    spec: KernelSpec,
    grid: SelectionGrid | None = None,
    subsample: int | None = None,
    subsample_seed: int = 0,
) -> tuple[float, list[ScoreEntry]]:
    """Pick the bandwidth minimizing the leave-one-out survival CV score.

    Returns the winning h (ties break toward the smaller value) and the full
    score table; the diagnostics column counts empty leave-one-out
    evaluations, which contribute a zero survival value. The double sum is
    O(n^2) per grid value; pass subsample to score a fixed-size random
    subset instead (off by default, deterministic given subsample_seed).
    """
    if sample.n < 2:
        raise ValueError("cross-validation needs n >= 2")
    grid = grid or SelectionGrid()
    if subsample is not None and 2 <= subsample < sample.n:
        idx = np.sort(
            np.random.default_rng([subsample_seed, sample.n]).choice(
                sample.n, size=subsample, replace=False
            )
        )
        sample = Sample(sample.covariates[idx], sample.responses[idx])
    Xs, Ys, pos_gt = _canonical_sort(sample)
    table: list[ScoreEntry] = []
    for h in grid.h_values:
        if spec.kid is not None:
            score, empties = _backend.cv_score(
                Xs, Ys, pos_gt, float(h), spec.kid, spec.norm_const / float(h) ** sample.p
            )
        else:
            score, empties = _cv_score_generic(sample, spec, Xs, Ys, pos_gt, float(h))
        table.append(ScoreEntry(float(h), float(score), int(empties)))
    finite = [e for e in table if np.isfinite(e.score)]
    if not finite:
        raise SelectionError("every bandwidth candidate produced a non-finite score")
    best = min(finite, key=lambda e: (e.score, e.value))
    return best.value, table


def default_probe_points(sample: Sample, count: int = DEFAULT_PROBE_COUNT) -> tuple[float, ...]:
    """Equispaced interior points of the covariate range (first coordinate)."""
    lo = float(sample.covariates[:, 0].min())
    hi = float(sample.covariates[:, 0].max())
    return tuple(lo + (hi - lo) * j / (count + 1) for j in range(1, count + 1))


def cv_alpha(
    sample: Sample,
    spec: KernelSpec,
    h: float,
    grid: SelectionGrid | None = None,
) -> tuple[float, list[ScoreEntry]]:
    """Pick the level minimizing the J=2 vs J=3 tail-index discrepancy.

    The bias-reduced index is computed with harmonic weights at each probe
    point; probes where estimation fails are skipped and counted. Ties break
    toward the smaller alpha.
    """
    if not h > 0:
        raise ValueError("bandwidth h must be positive")
    grid = grid or SelectionGrid()
    probes = grid.x_probe_points or default_probe_points(sample)
    if sample.p != 1:
        raise ValueError("level selection probes a univariate covariate")

    locals_by_probe = []
    for xp in probes:
        try:
            locals_by_probe.append((xp, local_fit(sample, spec, h, [xp])))
        except RectmError:
            locals_by_probe.append((xp, None))

    taus2, taus3 = harmonic_taus(2), harmonic_taus(3)
    table: list[ScoreEntry] = []
    for alpha in grid.alpha_values:
        total = 0.0
        fails = 0
        for xp, fit in locals_by_probe:
            if fit is None:
                fails += 1
                continue
            try:
                g2 = tail_index_from_locals(fit, alpha, taus2, (xp,)).gamma_tilde
                g3 = tail_index_from_locals(fit, alpha, taus3, (xp,)).gamma_tilde
            except RectmError:
                fails += 1
                continue
            total += (g2 - g3) ** 2
        score = total if fails < len(probes) else float("nan")
        table.append(ScoreEntry(float(alpha), score, fails))
    finite = [e for e in table if np.isfinite(e.score)]
    if not finite:
        raise SelectionError("every level candidate failed at every probe point")
    best = min(finite, key=lambda e: (e.score, e.value))
    return best.value, table


def score_table_csv(table: list[ScoreEntry], header: str) -> str:
    """Render a score table as CSV with a schema comment line."""
    lines = [f"# schema={header}", "value,score,diagnostics"]
    for e in table:
        lines.append(f"{e.value:.17g},{e.score:.17g},{e.diagnostics}")
    return "\n".join(lines) + "\n"
