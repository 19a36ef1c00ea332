"""Monte-Carlo replication harness over the Burr ground truth.

Each replication draws a fresh sample, evaluates the tail-index and
tail-moment estimators on an x-grid, and the report aggregates the per-cell
estimate vectors into boxplot-style summaries against the known truth.
Sub-seeds follow a fixed splitting rule (seed, replication index), so
results do not depend on execution order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .burr import BURR, BurrOracle
from .errors import RectmError
from .expectiles import harmonic_taus, tail_index_from_locals
from .kernels import KernelSpec, kernel_by_name
from .selection import SelectionGrid, cv_alpha, cv_bandwidth
from .smoothing import local_fit

SCHEMA_ESTIMATES = "rectm-simulation-estimates-v1"
SCHEMA_SUMMARY = "rectm-simulation-summary-v1"


def default_x_grid() -> tuple[float, ...]:
    """x = 0.05, 0.10, ..., 1.0."""
    return tuple(round(0.05 * j, 10) for j in range(1, 21))


@dataclass(frozen=True)
class SimulationConfig:
    n: int = 2000
    reps: int = 50
    x_grid: tuple[float, ...] = field(default_factory=default_x_grid)
    h: float | None = 0.1  # None: cross-validated once on a pre-sample
    alpha: float | None = 0.95  # None: cross-validated once on a pre-sample
    beta: float | None = None  # None: 1 - 1/n
    taus_J_list: tuple[int, ...] = (2,)
    k: float = 1.0
    seed: int = 0
    kernel: str = "biquadratic"
    select_per_replication: bool = False

    def __post_init__(self):
        if self.n < 1 or self.reps < 1:
            raise ValueError("n and reps must be >= 1")
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if any(J < 2 for J in self.taus_J_list):
            raise ValueError("every J must be >= 2")
        beta = self.beta if self.beta is not None else 1.0 - 1.0 / self.n
        if not 0.0 < beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.alpha is not None and not 0.0 < self.alpha < beta:
            raise ValueError("need 0 < alpha < beta")

    @property
    def beta_value(self) -> float:
        return self.beta if self.beta is not None else 1.0 - 1.0 / self.n

    def estimator_names(self) -> tuple[str, ...]:
        names = []
        for J in self.taus_J_list:
            names += [
                f"gamma_hat_J{J}",
                f"gamma_tilde_J{J}",
                f"rectm_plugin_J{J}",
                f"rectm_weissman_J{J}",
            ]
        return tuple(names)


@dataclass(frozen=True)
class ReplicationReport:
    """Estimate vectors per (x, estimator) cell plus run metadata.

    values[name] has shape (reps, len(x_grid)); failed cells hold NaN and
    are tallied in failures[name].
    """

    config: SimulationConfig
    h_used: float
    alpha_used: float
    beta_used: float
    values: dict[str, np.ndarray]
    failures: dict[str, np.ndarray]
    truth: dict[str, tuple[float, ...]]


def _rep_seed(seed: int, rep: int) -> list[int]:
    return [int(seed), int(rep)]


def _selection_seed(seed: int, reps: int) -> list[int]:
    return [int(seed), int(reps)]  # one past the last replication index


def _cell_truth(config: SimulationConfig, oracle: BurrOracle, beta: float) -> dict[str, tuple[float, ...]]:
    gamma_truth = tuple(oracle.gamma(x) for x in config.x_grid)
    rectm_truth = tuple(oracle.rectm(config.k, beta, x) for x in config.x_grid)
    truth: dict[str, tuple[float, ...]] = {}
    for J in config.taus_J_list:
        truth[f"gamma_hat_J{J}"] = gamma_truth
        truth[f"gamma_tilde_J{J}"] = gamma_truth
        truth[f"rectm_plugin_J{J}"] = rectm_truth
        truth[f"rectm_weissman_J{J}"] = rectm_truth
    return truth


def _select(sample, spec: KernelSpec, config: SimulationConfig) -> tuple[float, float]:
    grid = SelectionGrid()
    h = config.h if config.h is not None else cv_bandwidth(sample, spec, grid)[0]
    alpha = config.alpha if config.alpha is not None else cv_alpha(sample, spec, h, grid)[0]
    return float(h), float(alpha)


def run_simulation(config: SimulationConfig, oracle: BurrOracle = BURR) -> ReplicationReport:
    """Run the replication study; fully reproducible from config.seed."""
    spec = kernel_by_name(config.kernel, p=1)
    beta = config.beta_value

    if config.h is None or config.alpha is None:
        pre = oracle.sample(config.n, _selection_seed(config.seed, config.reps))
        h, alpha = _select(pre, spec, config)
    else:
        h, alpha = float(config.h), float(config.alpha)

    names = config.estimator_names()
    shape = (config.reps, len(config.x_grid))
    values = {name: np.full(shape, np.nan) for name in names}

    for r in range(config.reps):
        sample = oracle.sample(config.n, _rep_seed(config.seed, r))
        if config.select_per_replication and (config.h is None or config.alpha is None):
            h_r, alpha_r = _select(sample, spec, config)
        else:
            h_r, alpha_r = h, alpha
        for xi, x in enumerate(config.x_grid):
            try:
                fit = local_fit(sample, spec, h_r, [x])
            except RectmError:
                continue  # every estimator at this cell stays NaN
            for J in config.taus_J_list:
                taus = harmonic_taus(J)
                try:
                    at_alpha = tail_index_from_locals(fit, alpha_r, taus, (x,))
                    values[f"gamma_hat_J{J}"][r, xi] = at_alpha.gamma_hat
                    values[f"gamma_tilde_J{J}"][r, xi] = at_alpha.gamma_tilde
                    if config.k * at_alpha.gamma_tilde < 1.0:
                        plug = at_alpha.expectile.value ** config.k / (
                            1.0 - config.k * at_alpha.gamma_tilde
                        )
                        factor = ((1.0 - alpha_r) / (1.0 - beta)) ** (
                            config.k * at_alpha.gamma_tilde
                        )
                        values[f"rectm_weissman_J{J}"][r, xi] = plug * factor
                except RectmError:
                    pass
                try:
                    at_beta = tail_index_from_locals(fit, beta, taus, (x,))
                    if config.k * at_beta.gamma_tilde < 1.0:
                        values[f"rectm_plugin_J{J}"][r, xi] = at_beta.expectile.value ** config.k / (
                            1.0 - config.k * at_beta.gamma_tilde
                        )
                except RectmError:
                    pass

    failures = {
        name: np.sum(~np.isfinite(values[name]), axis=0).astype(int) for name in names
    }
    return ReplicationReport(
        config=config,
        h_used=h,
        alpha_used=alpha,
        beta_used=beta,
        values=values,
        failures=failures,
        truth=_cell_truth(config, oracle, beta),
    )


def _tukey_whiskers(vals: np.ndarray, q1: float, q3: float) -> tuple[float, float]:
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = vals[(vals >= lo_fence) & (vals <= hi_fence)]
    if inside.size == 0:
        return q1, q3
    return float(inside.min()), float(inside.max())


def summarize(report: ReplicationReport) -> list[dict]:
    """Boxplot-style summary rows, one per (x, estimator) cell."""
    rows = []
    for name in report.config.estimator_names():
        for xi, x in enumerate(report.config.x_grid):
            col = report.values[name][:, xi]
            ok = col[np.isfinite(col)]
            truth = report.truth[name][xi]
            if ok.size:
                q1, med, q3 = (float(np.percentile(ok, q)) for q in (25, 50, 75))
                w_lo, w_hi = _tukey_whiskers(ok, q1, q3)
                mae = float(np.mean(np.abs(ok - truth)))
            else:
                q1 = med = q3 = w_lo = w_hi = mae = math.nan
            rows.append(
                {
                    "x": float(x),
                    "estimator": name,
                    "count": int(ok.size),
                    "failures": int(report.failures[name][xi]),
                    "median": med,
                    "q1": q1,
                    "q3": q3,
                    "whisker_lo": w_lo,
                    "whisker_hi": w_hi,
                    "mean_abs_error": mae,
                    "truth": float(truth),
                }
            )
    return rows


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def report_csv(report: ReplicationReport) -> str:
    """Long-format CSV of every replication cell (NaN marks failures)."""
    lines = [f"# schema={SCHEMA_ESTIMATES}", "x,estimator,replication,value"]
    for name in report.config.estimator_names():
        arr = report.values[name]
        for xi, x in enumerate(report.config.x_grid):
            for r in range(report.config.reps):
                lines.append(f"{_fmt(float(x))},{name},{r},{_fmt(arr[r, xi])}")
    return "\n".join(lines) + "\n"


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def report_summary_json(report: ReplicationReport) -> str:
    cfg = report.config
    payload = {
        "schema": SCHEMA_SUMMARY,
        "metadata": {
            "n": cfg.n,
            "reps": cfg.reps,
            "h": report.h_used,
            "alpha": report.alpha_used,
            "beta": report.beta_used,
            "taus_J_list": list(cfg.taus_J_list),
            "k": cfg.k,
            "seed": cfg.seed,
            "kernel": cfg.kernel,
        },
        "cells": [{k: _json_safe(v) for k, v in row.items()} for row in summarize(report)],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def export_report(report: ReplicationReport, out_dir) -> dict[str, str]:
    """Write estimates.csv and summary.json; byte-deterministic per report."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "estimates": out / "estimates.csv",
        "summary": out / "summary.json",
    }
    try:
        paths["estimates"].write_text(report_csv(report), encoding="utf-8", newline="\n")
        paths["summary"].write_text(report_summary_json(report), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"failed writing report under {out}: {exc}") from exc
    return {k: str(v) for k, v in paths.items()}
