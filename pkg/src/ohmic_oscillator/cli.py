"""Command-line front end: ``ohmic-osc <command> --config <path> [--out <path>]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import ConfigError, RunConfig, parse_config, serialize
from .correlations import correlation_profile, decay_rate_fit
from .errata import errata_ledger
from .gaussian_state import diagnose
from .lattice_oracle import extract_report, run_lattice
from .model import classify_regime
from .spectral_moments import covariance, moment_qp_residual
from .thermometer import extrapolate_mu_to_zero, thermometer_moments, zpz_residual

__all__ = ["COMMANDS", "Result", "main", "run", "write_csv", "write_json"]

SCHEMA = 1
DEFAULT_MUS = (1e-2, 3e-3, 1e-3)
EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_MODULE = 0, 1, 2, 3


@dataclass
class Result:
    command: str
    columns: list[str]
    rows: list[dict]
    checks: dict[str, bool] = field(default_factory=dict)
    report: dict = field(default_factory=dict)
    series: list[dict] | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _moments_row(p, tol):
    c = covariance(p, tol)
    return {
        "omega": p.omega,
        "eps": p.eps,
        "cutoff": p.cutoff,
        "regime": classify_regime(p).value,
        "qq": c.qq,
        "qp": c.qp,
        "pp": c.pp,
        "qp_residual": moment_qp_residual(p),
        "det": c.det,
    }


def _temperature_row(p, tol):
    row = _moments_row(p, tol)
    d = diagnose(covariance(p, tol))
    row.update(nu=d.nu, lambda_eff=d.lambda_eff, temperature=d.temperature, entropy=d.entropy, purity=d.purity)
    return row


def cmd_moments(cfg: RunConfig) -> Result:
    row = _moments_row(cfg.model, cfg.quad_tol)
    checks = {"uncertainty": row["det"] >= 0.25 - 1e-9, "qp_residual": abs(row["qp_residual"]) < 1e-10}
    return Result("moments", list(row), [row], checks)


def cmd_temperature(cfg: RunConfig) -> Result:
    row = _temperature_row(cfg.model, cfg.quad_tol)
    checks = {"nu_at_least_half": row["nu"] >= 0.5 - 1e-9, "qp_residual": abs(row["qp_residual"]) < 1e-10}
    return Result("temperature", list(row), [row], checks)


def cmd_thermometer(cfg: RunConfig) -> Result:
    p = cfg.model
    if p.lambda_th is None:
        raise ConfigError("thermometer command needs model.lambda_th", "model.lambda_th")
    mus = cfg.sweep_values if cfg.sweep_axis == "mu" else DEFAULT_MUS
    results = [thermometer_moments(p.replace(mu=m)) for m in mus]
    cols = ["label", "mu", "zz", "pzpz", "zpz", "nu", "temperature"]
    rows = [
        {"label": "point", "mu": r.mu, "zz": r.zz, "pzpz": r.pzpz, "zpz": r.zpz,
         "nu": r.diagnostics.nu, "temperature": r.diagnostics.temperature}
        for r in results
    ]
    checks = {f"nu_at_least_half[{r.mu:g}]": r.diagnostics.nu >= 0.5 - 1e-9 for r in results}
    checks.update({f"zpz_residual[{r.mu:g}]": zpz_residual(p.replace(mu=r.mu)) < 1e-10 for r in results})
    report = {}
    if len(results) >= 3:
        ex = extrapolate_mu_to_zero(results)
        d = ex["diagnostics"]
        rows.append({"label": "extrapolated", "mu": 0.0, "zz": ex["zz"], "pzpz": ex["pzpz"], "zpz": 0.0,
                     "nu": d.nu, "temperature": d.temperature})
        report = {"zz_residual": ex["zz_residual"], "pzpz_residual": ex["pzpz_residual"]}
        checks["extrapolated_zz"] = abs(ex["zz"] - 0.5 / p.lambda_th) <= 1e-4
    return Result("thermometer", cols, rows, checks, report)


def cmd_correlations(cfg: RunConfig) -> Result:
    p = cfg.model
    prof = correlation_profile(p, tol=cfg.quad_tol, fit=False)
    cols = ["x", "sym_fourier", "sym_retarded", "vacuum", "dragged", "commutator"]
    rows = [
        dict(zip(cols, (float(x), float(a), float(b), float(v), float(d), float(c))))
        for x, a, b, v, d, c in zip(prof.xs, prof.sym, prof.sym_retarded, prof.vacuum, prof.dragged, prof.comm)
    ]
    checks = {"commutator": float(np.max(prof.comm)) < 1e-8}
    report = {}
    if p.eps > 0:
        fit = decay_rate_fit(prof.xs, prof.dragged, rms_threshold=cfg.fit_rms)
        report = {"decay_rate": fit.decay_rate, "ci95": list(fit.ci95), "fit_rms": fit.fit_rms,
                  "amplitude": fit.amplitude, "printed_rate": p.eps**2 / 2, "rederived_rate": p.eps**2 / 4}
        checks["fit_rms"] = fit.fit_rms <= cfg.fit_rms
    return Result("correlations", cols, rows, checks, report)


def cmd_oracle(cfg: RunConfig) -> Result:
    if cfg.lattice is None:
        raise ConfigError("oracle command needs a lattice section", "lattice")
    run_ = run_lattice(cfg.model, cfg.lattice)
    rep = extract_report(run_, tol=cfg.quad_tol)
    cols = ["name", "oracle", "reference", "error", "tol", "passed"]
    rows = [{k: c.as_dict()[k] for k in cols} for c in rep.checks]
    series = None
    if cfg.output_series:
        series = []
        for i, t in enumerate(run_.times):
            s = {"t": float(t), "qq": run_.cov_q[i, 0], "qp": run_.cov_q[i, 1], "pp": run_.cov_q[i, 2]}
            if run_.cov_z is not None:
                s.update(zz=run_.cov_z[i, 0], zpz=run_.cov_z[i, 1], pzpz=run_.cov_z[i, 2])
            series.append(s)
    checks = {c.name: c.passed for c in rep.checks}
    return Result("oracle", cols, rows, checks, rep.as_dict(), series)


def cmd_errata(cfg: RunConfig) -> Result:
    entries = [e.as_dict() for e in errata_ledger()]
    cols = ["code", "quantity", "printed", "rederived", "oracle", "rederived_error", "tol", "verdict"]
    rows = [{k: e[k] for k in cols} for e in entries]
    return Result("errata", cols, rows, {e["code"]: e["passed"] for e in entries}, {"entries": entries})


def _sweep_point(args):
    p, tol = args
    return _temperature_row(p, tol)


def cmd_sweep(cfg: RunConfig, workers: int | None = None) -> Result:
    if cfg.sweep_axis is None:
        raise ConfigError("sweep command needs sweep.axis and sweep.values", "sweep")
    points = [(cfg.model.replace(**{cfg.sweep_axis: v}), cfg.quad_tol) for v in cfg.sweep_values]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_sweep_point, points))  # map preserves input order
    cols = ["axis_value"] + list(rows[0])
    rows = [{"axis_value": v, **row} for v, row in zip(cfg.sweep_values, rows)]
    checks = {f"nu_at_least_half[{i}]": r["nu"] >= 0.5 - 1e-9 for i, r in enumerate(rows)}
    return Result("sweep", cols, rows, checks, {"axis": cfg.sweep_axis})


COMMANDS = {
    "moments": cmd_moments,
    "temperature": cmd_temperature,
    "thermometer": cmd_thermometer,
    "correlations": cmd_correlations,
    "oracle": cmd_oracle,
    "errata": cmd_errata,
    "sweep": cmd_sweep,
}


def run(command: str, cfg: RunConfig) -> Result:
    return COMMANDS[command](cfg)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


def write_csv(result: Result, columns=None, rows=None) -> str:
    columns = columns or result.columns
    rows = result.rows if rows is None else rows
    buf = io.StringIO()
    buf.write(f"#schema={SCHEMA} command={result.command}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_json(result: Result, cfg: RunConfig) -> str:
    doc = {
        "schema": SCHEMA,
        "command": result.command,
        "config": serialize(cfg),
        "columns": result.columns,
        "rows": result.rows,
        "report": result.report,
        "checks": result.checks,
        "ok": result.ok,
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="ohmic-osc", description=__doc__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="flat section.key=value file")
    ap.add_argument("--out", help="output path (overrides output.path; default stdout)")
    args = ap.parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # surfaced with module and parameters
        module = type(exc).__module__.rsplit(".", 1)[-1]
        print(f"{module}: {type(exc).__name__}: {exc} [params {asdict(cfg.model)}]", file=sys.stderr)
        return EXIT_MODULE
    text = write_json(result, cfg) if cfg.output_format == "json" else write_csv(result)
    out = args.out or cfg.output_path
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if result.series is not None:
        cols = list(result.series[0]) if result.series else ["t"]
        with open(cfg.output_series, "w", encoding="utf-8", newline="") as fh:
            fh.write(write_csv(Result("series", cols, result.series)))
    for name, ok in result.checks.items():
        if not ok:
            print(f"check failed: {name}", file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_CHECKS


if __name__ == "__main__":
    sys.exit(main())
