"""Command-line front end: estimation, selection, simulation, intervals.

Configuration comes from an optional JSON file (--config) overlaid by
command-line flags (flags win). Exit status: 0 success (possibly with
flagged rows), 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from .asymptotics import confidence_interval, lambda22_plugin
from .burr import BURR
from .errors import ConfigurationError, DataError, RectmError
from .expectiles import harmonic_taus, tail_index_from_locals
from .kernels import kernel_by_name
from .selection import SelectionGrid, cv_alpha, cv_bandwidth, score_table_csv
from .simulation import SimulationConfig, export_report, run_simulation
from .smoothing import Sample, local_fit

SCHEMA_ESTIMATES = "rectm-estimates-v1"
SCHEMA_RUN = "rectm-run-v1"
SCHEMA_SELECTION = "rectm-selection-v1"

COMMANDS = ("estimate", "select", "simulate", "ci")


@dataclass
class RunConfig:
    command: str = ""
    input: str | None = None
    dgp: str | None = None
    n: int | None = None
    x_col: str | None = None
    y_col: str | None = None
    log_x: bool = False
    x_range: tuple[float, float] | None = None
    kernel: str = "biquadratic"
    h: float | None = None
    alpha: float | None = None
    beta: float | None = None
    k: float = 1.0
    J: int = 2
    theta: float = 0.05
    grid: tuple[float, ...] | None = None
    reps: int = 50
    seed: int = 0
    out: str = "rectm_out"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigurationError(f"command must be one of {COMMANDS}")
        if self.command == "simulate":
            if self.input is not None:
                raise ConfigurationError("simulate runs on the built-in DGP, not on a file")
        elif (self.input is None) == (self.dgp is None):
            raise ConfigurationError("exactly one data source: --input or --dgp")
        if self.dgp is not None and self.dgp != "burr":
            raise ConfigurationError("the only built-in DGP is 'burr'")
        if self.dgp is not None and (self.n is None or self.n < 1):
            raise ConfigurationError("--dgp needs --n >= 1")
        if self.input is not None and (self.x_col is None or self.y_col is None):
            raise ConfigurationError("--input needs --x-col and --y-col")
        for name, v, lo, hi in (
            ("alpha", self.alpha, 0.0, 1.0),
            ("beta", self.beta, 0.0, 1.0),
            ("theta", self.theta, 0.0, 1.0),
        ):
            if v is not None and not lo < v < hi:
                raise ConfigurationError(f"{name} must lie in ({lo}, {hi})")
        if self.h is not None and not self.h > 0:
            raise ConfigurationError("h must be positive")
        if self.alpha is not None and self.beta is not None and self.beta < self.alpha:
            raise ConfigurationError("need beta >= alpha")
        if self.k < 0:
            raise ConfigurationError("k must be nonnegative")
        if self.J < 2:
            raise ConfigurationError("J must be >= 2")
        if self.reps < 1:
            raise ConfigurationError("reps must be >= 1")
        if self.x_range is not None and not self.x_range[0] < self.x_range[1]:
            raise ConfigurationError("x-range must be lo < hi")
        try:
            kernel_by_name(self.kernel)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        return self


def _parse_range(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace(":", ",").split(",") if p]
    if len(parts) != 2:
        raise ConfigurationError(f"expected 'lo,hi', got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigurationError("grid spec is 'start:stop:count' or a comma list")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigurationError("grid count must be >= 1")
        return tuple(float(v) for v in np.linspace(start, stop, count))
    return tuple(float(v) for v in text.split(",") if v)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rectm",
        description="Expectile-based conditional tail moment estimation",
    )
    ap.add_argument("--config", help="JSON config file; flags override its entries")
    ap.add_argument("--command", choices=COMMANDS)
    ap.add_argument("--input", help="CSV file with a header row")
    ap.add_argument("--dgp", help="built-in data generator (burr)")
    ap.add_argument("--n", type=int, help="sample size for --dgp")
    ap.add_argument("--x-col", dest="x_col", help="covariate column name")
    ap.add_argument("--y-col", dest="y_col", help="response column name")
    ap.add_argument("--log-x", dest="log_x", action="store_true", default=None,
                    help="log-transform the covariate before filtering")
    ap.add_argument("--x-range", dest="x_range", help="keep covariates in 'lo,hi' (after transform)")
    ap.add_argument("--kernel", help="kernel name (biquadratic, uniform)")
    ap.add_argument("--h", type=float, help="bandwidth; omit to cross-validate")
    ap.add_argument("--alpha", type=float, help="intermediate level; omit to cross-validate")
    ap.add_argument("--beta", type=float, help="extrapolation level (default 1 - 1/n)")
    ap.add_argument("--k", type=float, help="moment order")
    ap.add_argument("--J", type=int, help="number of harmonic weights")
    ap.add_argument("--theta", type=float, help="CI error level (default 0.05)")
    ap.add_argument("--grid", help="x evaluation grid: 'start:stop:count' or comma list")
    ap.add_argument("--reps", type=int, help="replication count for simulate")
    ap.add_argument("--seed", type=int, help="base seed")
    ap.add_argument("--out", help="output directory")
    return ap


def load_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    base: dict = {}
    if ns.config:
        path = Path(ns.config)
        if not path.is_file():
            raise ConfigurationError(f"config file not found: {path}")
        try:
            base = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(base, dict):
            raise ConfigurationError("config file must hold a JSON object")

    cfg = RunConfig()
    known = set(cfg.__dataclass_fields__)
    unknown = set(base) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    for key, value in base.items():
        if key == "x_range" and value is not None:
            value = _parse_range(value) if isinstance(value, str) else tuple(float(v) for v in value)
        if key == "grid" and value is not None:
            value = _parse_grid(value) if isinstance(value, str) else tuple(float(v) for v in value)
        setattr(cfg, key, value)
    for key in known:
        flag = getattr(ns, key, None)
        if flag is None:
            continue
        if key == "x_range":
            flag = _parse_range(flag)
        if key == "grid":
            flag = _parse_grid(flag)
        setattr(cfg, key, flag)
    return cfg.validate()


@dataclass
class IngestReport:
    rows_read: int = 0
    rows_kept: int = 0
    dropped: list[tuple[int, str]] = field(default_factory=list)


def ingest_csv(path, mapping: tuple[str, str], log_x: bool = False,
               x_range: tuple[float, float] | None = None) -> tuple[Sample, IngestReport]:
    """Read (covariate, response) pairs from a delimited file.

    mapping names the (covariate, response) columns. Rows that fail numeric
    parsing (or the log transform) are dropped with a recorded reason; the
    range filter applies to the transformed covariate.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"input file not found: {path}")
    x_col, y_col = mapping
    xs: list[float] = []
    ys: list[float] = []
    report = IngestReport()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        missing = {x_col, y_col} - set(reader.fieldnames)
        if missing:
            raise ConfigurationError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            report.rows_read += 1
            try:
                x = float(row[x_col])
                y = float(row[y_col])
            except (TypeError, ValueError):
                report.dropped.append((lineno, "non-numeric"))
                continue
            if not (math.isfinite(x) and math.isfinite(y)):
                report.dropped.append((lineno, "non-finite"))
                continue
            if log_x:
                if x <= 0:
                    report.dropped.append((lineno, "log of non-positive covariate"))
                    continue
                x = math.log(x)
            if x_range is not None and not x_range[0] <= x <= x_range[1]:
                report.dropped.append((lineno, "outside x-range"))
                continue
            xs.append(x)
            ys.append(y)
    if not xs:
        raise DataError(f"{path}: no rows retained")
    report.rows_kept = len(xs)
    return Sample(np.array(xs), np.array(ys)), report


def _load_sample(cfg: RunConfig) -> tuple[Sample, IngestReport | None]:
    if cfg.input is not None:
        return ingest_csv(cfg.input, (cfg.x_col, cfg.y_col), cfg.log_x, cfg.x_range)
    return BURR.sample(cfg.n, cfg.seed), None


def _fmt(v: float | None) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "nan"
    return f"{float(v):.17g}"


def _default_grid(sample: Sample) -> tuple[float, ...]:
    lo = float(sample.covariates[:, 0].min())
    hi = float(sample.covariates[:, 0].max())
    return tuple(float(v) for v in np.linspace(lo + 0.025 * (hi - lo), hi - 0.025 * (hi - lo), 20))


def _resolve_h_alpha(cfg: RunConfig, sample: Sample, spec) -> tuple[float, float]:
    h = cfg.h
    alpha = cfg.alpha
    if h is None:
        h, _ = cv_bandwidth(sample, spec, SelectionGrid())
    if alpha is None:
        alpha, _ = cv_alpha(sample, spec, h, SelectionGrid())
    return float(h), float(alpha)


def run_estimate(cfg: RunConfig) -> dict[str, str]:
    """Estimate the expectile, tail index and tail moments on an x grid.

    Writes estimates.csv (one row per grid point; failures flagged, not
    fabricated) and run.json with the resolved configuration.
    """
    sample, ingest = _load_sample(cfg)
    spec = kernel_by_name(cfg.kernel, p=sample.p)
    h, alpha = _resolve_h_alpha(cfg, sample, spec)
    beta = cfg.beta if cfg.beta is not None else 1.0 - 1.0 / sample.n
    if beta < alpha:
        raise ConfigurationError("resolved beta < alpha; pass an explicit --beta")
    taus = harmonic_taus(cfg.J)
    grid = cfg.grid if cfg.grid is not None else _default_grid(sample)
    with_ci = cfg.command == "ci"

    header = ["x", "e_alpha", "gamma_hat", "gamma_tilde", "rectm_plugin", "rectm_weissman", "flag"]
    if with_ci:
        header += ["ci_lo", "ci_hi", "ci_status"]
    lines = [f"# schema={SCHEMA_ESTIMATES}", ",".join(header)]

    for x in grid:
        row: dict[str, object] = {
            "x": x, "e_alpha": None, "gamma_hat": None, "gamma_tilde": None,
            "rectm_plugin": None, "rectm_weissman": None, "flag": "ok",
            "ci_lo": None, "ci_hi": None, "ci_status": "none",
        }
        try:
            fit = local_fit(sample, spec, h, [x])
            t = tail_index_from_locals(fit, alpha, taus, (float(x),))
            row["e_alpha"] = t.expectile.value
            row["gamma_hat"] = t.gamma_hat
            row["gamma_tilde"] = t.gamma_tilde
            if cfg.k * t.gamma_tilde >= 1.0:
                row["flag"] = "moment-nonexistent"
            else:
                plug = t.expectile.value ** cfg.k / (1.0 - cfg.k * t.gamma_tilde)
                factor = ((1.0 - alpha) / (1.0 - beta)) ** (cfg.k * t.gamma_tilde)
                row["rectm_plugin"] = plug
                row["rectm_weissman"] = plug * factor
                if with_ci:
                    l22 = lambda22_plugin(t.gamma_tilde, taus)
                    est = SimpleNamespace(value=plug * factor, k=cfg.k)
                    ci = confidence_interval(
                        est, t.gamma_tilde, t.g_hat, sample.n, h, sample.p,
                        alpha, beta, cfg.theta, spec, l22,
                    )
                    row["ci_lo"], row["ci_hi"], row["ci_status"] = ci.lo, ci.hi, ci.status
        except RectmError as exc:
            row["flag"] = type(exc).__name__
        cells = [_fmt(x), _fmt(row["e_alpha"]), _fmt(row["gamma_hat"]), _fmt(row["gamma_tilde"]),
                 _fmt(row["rectm_plugin"]), _fmt(row["rectm_weissman"]), str(row["flag"])]
        if with_ci:
            cells += [_fmt(row["ci_lo"]), _fmt(row["ci_hi"]), str(row["ci_status"])]
        lines.append(",".join(cells))

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    est_path = out / "estimates.csv"
    est_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    meta = {
        "schema": SCHEMA_RUN,
        "command": cfg.command,
        "kernel": cfg.kernel,
        "h": h,
        "alpha": alpha,
        "beta": beta,
        "k": cfg.k,
        "J": cfg.J,
        "theta": cfg.theta,
        "seed": cfg.seed,
        "n": sample.n,
        "source": cfg.input if cfg.input is not None else f"dgp:{cfg.dgp}",
        "rows_read": ingest.rows_read if ingest else sample.n,
        "rows_dropped": len(ingest.dropped) if ingest else 0,
    }
    run_path = out / "run.json"
    run_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n",
                        encoding="utf-8", newline="\n")
    return {"estimates": str(est_path), "run": str(run_path)}


def run_select(cfg: RunConfig) -> dict[str, str]:
    sample, _ = _load_sample(cfg)
    spec = kernel_by_name(cfg.kernel, p=sample.p)
    grid = SelectionGrid()
    h_cv, h_table = cv_bandwidth(sample, spec, grid)
    alpha_star, a_table = cv_alpha(sample, spec, h_cv, grid)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, table in (("h_scores", h_table), ("alpha_scores", a_table)):
        p = out / f"{name}.csv"
        p.write_text(score_table_csv(table, f"{SCHEMA_SELECTION}:{name}"),
                     encoding="utf-8", newline="\n")
        paths[name] = str(p)
    sel = {"schema": SCHEMA_SELECTION, "h_cv": h_cv, "alpha_star": alpha_star, "seed": cfg.seed}
    p = out / "selection.json"
    p.write_text(json.dumps(sel, sort_keys=True, indent=2) + "\n", encoding="utf-8", newline="\n")
    paths["selection"] = str(p)
    return paths


def run_simulate(cfg: RunConfig) -> dict[str, str]:
    sim = SimulationConfig(
        n=cfg.n if cfg.n is not None else 2000,
        reps=cfg.reps,
        x_grid=cfg.grid if cfg.grid is not None else SimulationConfig().x_grid,
        h=cfg.h,
        alpha=cfg.alpha,
        beta=cfg.beta,
        taus_J_list=(cfg.J,),
        k=cfg.k,
        seed=cfg.seed,
        kernel=cfg.kernel,
    )
    report = run_simulation(sim)
    return export_report(report, cfg.out)


def main(argv=None) -> int:
    try:
        cfg = load_config(argv)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    try:
        if cfg.command in ("estimate", "ci"):
            paths = run_estimate(cfg)
        elif cfg.command == "select":
            paths = run_select(cfg)
        else:
            paths = run_simulate(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (DataError, RectmError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
