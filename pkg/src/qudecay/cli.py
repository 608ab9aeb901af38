"""Command-line surface: simulate, rate, compare, sweep, presets, check.

Examples:
  qudecay presets
  qudecay simulate --preset sec3a --out run.csv
  qudecay simulate --config params.json --order 8 --t-end 4 --out run.csv --plot-script
  qudecay rate --preset fig4 --out rate.csv
  qudecay compare --preset fig3a --out cmp.csv
  qudecay sweep --preset fig1a --axis phase --values 0,0.79,1.57 --out sweepdir
  qudecay check

Config files are flat JSON in SI units (omega0, omega, rabi in rad/s,
gamma in 1/s, phase in rad) plus optional solver keys (order, t_end in
units of 1/gamma, tol, include_h0, n_points).  A run manifest fed back via
--config reproduces the identical CSV byte-for-byte.

Exit codes: 0 success, 2 configuration/regime error, 3 numerical failure
(or I/O), 4 invariant breach.  Errors print one line on stderr in the form
"error: <kind>: <message>".
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_all
from .dynamics import DEFAULT_GRID_POINTS, Trajectory, exponential_law
from .errors import InvariantBreach, NumericalFailure, RegimeError, ResourceLimit
from .params import DriveParams, ModelOrder, derive
from .rates import gamma_bar, harmonic_amplitudes
from .scenarios import (
    ComparisonReport,
    ScenarioPreset,
    compare,
    params_digest,
    preset,
    preset_names,
    run,
    sweep,
)

CSV_HEADER = "t_gamma,sz,gbar,residual_exp"
RATE_HEADER = "t_gamma,gbar"
COMPARE_HEADER = "t_gamma,sz_a,sz_b,diff"

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_NUMERIC = 3
_EXIT_INVARIANT = 4


def _fmt(value: float) -> str:
    return f"{value:.15g}"


def write_csv(traj: Trajectory, path) -> str:
    """Write the trajectory CSV (15 significant digits) and return the
    sha256 of the byte stream."""
    residual = traj.sz - exponential_law(traj.grid)
    lines = [CSV_HEADER]
    for t, sz, gb, res in zip(traj.grid, traj.sz, traj.gbar, residual):
        lines.append(f"{_fmt(t)},{_fmt(sz)},{_fmt(gb)},{_fmt(res)}")
    return _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text: str) -> str:
    data = text.encode()
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def _write_rate_csv(grid, gbar, path) -> str:
    lines = [RATE_HEADER]
    for t, gb in zip(grid, gbar):
        lines.append(f"{_fmt(t)},{_fmt(gb)}")
    return _write_text(path, "\n".join(lines) + "\n")


def _write_compare_csv(report: ComparisonReport, path) -> str:
    names = list(report.series)
    sa, sb = report.series[names[0]], report.series[names[1]]
    lines = [COMPARE_HEADER]
    for t, a, b in zip(report.grid, sa, sb):
        lines.append(f"{_fmt(t)},{_fmt(a)},{_fmt(b)},{_fmt(a - b)}")
    return _write_text(path, "\n".join(lines) + "\n")


def emit_plot_script(csv_path, script_path, kind: str = "sz") -> None:
    """Write a self-contained gnuplot script next to a CSV.

    kind "sz": solid driven curve plus the dashed undriven exponential;
    "gbar": scaled rate with the gamma-bar = 1 reference; "compare": both
    model curves plus the dashed exponential.
    """
    csv_name = Path(csv_path).name
    head = [
        "# gnuplot script (re-runnable; renders next to the CSV)",
        "set datafile separator ','",
        "set xlabel 'gamma t'",
        "set grid",
        "set key left bottom",
    ]
    if kind == "gbar":
        body = [
            "set ylabel 'gbar(t)/gamma'",
            f"plot '{csv_name}' skip 1 using 1:2 with lines lw 2 title 'driven rate', \\",
            "     1.0 with lines dashtype 2 lc rgb 'black' title 'bare rate'",
        ]
    elif kind == "compare":
        body = [
            "set ylabel '<S_z>'",
            f"plot '{csv_name}' skip 1 using 1:2 with lines lw 2 title 'transformed', \\",
            f"     '{csv_name}' skip 1 using 1:3 with lines lw 2 title 'reference', \\",
            "     -0.5+exp(-x) with lines dashtype 2 lc rgb 'black' title 'undriven'",
        ]
    else:
        body = [
            "set ylabel '<S_z>'",
            f"plot '{csv_name}' skip 1 using 1:2 with lines lw 2 title 'driven', \\",
            "     -0.5+exp(-x) with lines dashtype 2 lc rgb 'black' title 'undriven'",
        ]
    _write_text(script_path, "\n".join(head + body) + "\n")


def _load_config(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise RegimeError(f"cannot read config {path}: {exc}") from exc
    if isinstance(raw, dict) and "config" in raw and isinstance(raw["config"], dict):
        raw = raw["config"]  # a manifest fed back as a config
    if not isinstance(raw, dict):
        raise RegimeError(f"config {path} must be a JSON object")
    return raw


def _resolve(args) -> tuple[DriveParams, ModelOrder, float, dict]:
    """Merge preset/config with CLI overrides into (params, order, t_end, solver)."""
    solver = {"tol": 1e-9, "include_h0": False, "n_points": DEFAULT_GRID_POINTS}
    config_si: dict = {}
    if args.preset and args.config:
        raise RegimeError("give either --preset or --config, not both")
    if args.preset:
        sc = preset(args.preset)
        params, order, t_end = sc.params, sc.order, sc.t_end
    elif args.config:
        cfg = _load_config(args.config)
        known = {"omega0", "omega", "rabi", "phase", "gamma", "order", "t_end",
                 "tol", "include_h0", "n_points", "x_max", "ratio_max"}
        unknown = set(cfg) - known
        if unknown:
            raise RegimeError(f"unknown config keys: {', '.join(sorted(unknown))}")
        try:
            params = DriveParams(
                omega0=float(cfg["omega0"]),
                omega=float(cfg["omega"]),
                rabi=float(cfg.get("rabi", 0.0)),
                phase=float(cfg.get("phase", 0.0)),
                gamma=float(cfg.get("gamma", 1.0)),
                x_max=float(cfg.get("x_max", 1.0)),
                ratio_max=float(cfg.get("ratio_max", 1e-2)),
            )
        except KeyError as exc:
            raise RegimeError(f"config missing required key {exc.args[0]!r}") from None
        config_si = {"omega0": params.omega0, "omega": params.omega,
                     "rabi": params.rabi, "phase": params.phase, "gamma": params.gamma}
        order = ModelOrder.parse(cfg.get("order", "8"))
        t_end = float(cfg.get("t_end", 4.0))
        solver["tol"] = float(cfg.get("tol", solver["tol"]))
        solver["include_h0"] = bool(cfg.get("include_h0", False))
        solver["n_points"] = int(cfg.get("n_points", solver["n_points"]))
    else:
        raise RegimeError("one of --preset or --config is required")

    if args.order:
        order = ModelOrder.parse(args.order)
    if args.t_end is not None:
        t_end = float(args.t_end)
    if args.tol is not None:
        solver["tol"] = float(args.tol)
    if args.include_h0:
        solver["include_h0"] = True
    if getattr(args, "n_points", None):
        solver["n_points"] = int(args.n_points)
    solver["config_si"] = config_si or None
    return params, order, t_end, solver


def _manifest(out_path, csv_hash: str, params: DriveParams, order: ModelOrder,
              t_end: float, solver: dict, wall_s: float, extra: dict | None = None) -> None:
    scaled = params.scaled()
    d = derive(scaled, order)
    config = {
        "omega0": params.omega0, "omega": params.omega, "rabi": params.rabi,
        "phase": params.phase, "gamma": params.gamma,
        "order": order.value, "t_end": t_end, "tol": solver["tol"],
        "include_h0": solver["include_h0"], "n_points": solver["n_points"],
    }
    doc = {
        "tool": "qudecay",
        "version": __version__,
        "config": config,
        "params_scaled": {"omega0": scaled.omega0, "omega": scaled.omega,
                          "rabi": scaled.rabi, "phase": scaled.phase, "gamma": 1.0},
        "derived": {k: getattr(d, k) for k in (
            "x", "eta", "xi", "beta", "rho", "eta_bar", "xi_bar", "beta_bar",
            "omega0_bar", "omega0_tilde")},
        "digest": params_digest(scaled, order, t_end, solver["tol"],
                                solver["include_h0"], solver["n_points"]),
        "wall_s": wall_s,
        "csv_sha256": csv_hash,
        "out": str(out_path),
    }
    if extra:
        doc.update(extra)
    Path(f"{out_path}.manifest.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n"
    )


def _require_out(args) -> Path:
    if not args.out:
        raise RegimeError("--out PATH is required for this subcommand")
    return Path(args.out)


def _cmd_simulate(args) -> int:
    params, order, t_end, solver = _resolve(args)
    out = _require_out(args)
    t0 = time.perf_counter()
    sc = ScenarioPreset(name=args.preset or "config", params=params.scaled(),
                        order=order, t_end=t_end)
    traj = run(sc, tol=solver["tol"], include_h0=solver["include_h0"],
               n_points=solver["n_points"])
    csv_hash = write_csv(traj, out)
    wall = time.perf_counter() - t0
    _manifest(out, csv_hash, params, order, t_end, solver, wall,
              extra={"truncation": traj.meta.get("truncation", {})})
    if args.plot_script:
        emit_plot_script(out, f"{out}.gp", kind="sz")
    print(f"wrote {out} ({len(traj.grid)} rows, sha256 {csv_hash[:12]}...)")
    return _EXIT_OK


def _cmd_rate(args) -> int:
    params, order, t_end, solver = _resolve(args)
    if order is ModelOrder.STANDARD:
        raise RegimeError("rate mode needs the order-2 or order-8 model")
    out = _require_out(args)
    t0 = time.perf_counter()
    scaled = params.scaled()
    d = derive(scaled, order)
    spec = harmonic_amplitudes(d, scaled, order)
    grid = np.linspace(0.0, t_end, solver["n_points"])
    gbar = gamma_bar(grid, spec, scaled) / scaled.gamma
    csv_hash = _write_rate_csv(grid, gbar, out)
    wall = time.perf_counter() - t0
    _manifest(out, csv_hash, params, order, t_end, solver, wall,
              extra={"truncation": spec.meta["truncation"], "channel": "gbar"})
    if args.plot_script:
        emit_plot_script(out, f"{out}.gp", kind="gbar")
    print(f"wrote {out} ({len(grid)} rows, sha256 {csv_hash[:12]}...)")
    return _EXIT_OK


def _cmd_compare(args) -> int:
    if not args.preset:
        raise RegimeError("compare needs --preset (and optionally --vs)")
    sc_a = preset(args.preset)
    if args.order:
        sc_a = replace(sc_a, order=ModelOrder.parse(args.order))
    if args.vs:
        sc_b = preset(args.vs)
    else:
        sc_b = replace(sc_a, name=f"{sc_a.name}-standard", order=ModelOrder.STANDARD)
    if args.t_end is not None:
        sc_a = replace(sc_a, t_end=float(args.t_end))
        sc_b = replace(sc_b, t_end=float(args.t_end))
    out = _require_out(args)
    tol = args.tol if args.tol is not None else 1e-9
    n_points = args.n_points or DEFAULT_GRID_POINTS
    report = compare(sc_a, sc_b, tol=tol, n_points=n_points, threads=args.threads or 2)
    csv_hash = _write_compare_csv(report, out)
    doc = {
        "tool": "qudecay", "version": __version__,
        "series": list(report.series), "metrics": report.metrics,
        "csv_sha256": csv_hash, "out": str(out),
    }
    Path(f"{out}.manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if args.plot_script:
        emit_plot_script(out, f"{out}.gp", kind="compare")
    m = report.metrics
    print(f"max |diff| = {m['max_abs_diff']:.6g}; early mean diff = {m['early_mean_diff']:.6g}")
    return _EXIT_OK


def _cmd_sweep(args) -> int:
    if not args.preset:
        raise RegimeError("sweep needs --preset as the base configuration")
    if not args.axis or args.values is None:
        raise RegimeError("sweep needs --axis and --values")
    base = preset(args.preset)
    if args.order:
        base = replace(base, order=ModelOrder.parse(args.order))
    if args.t_end is not None:
        base = replace(base, t_end=float(args.t_end))
    values = [v for v in (s.strip() for s in args.values.split(",")) if v]
    if args.axis != "order":
        values = [float(v) for v in values]
    outdir = _require_out(args)
    outdir.mkdir(parents=True, exist_ok=True)
    tol = args.tol if args.tol is not None else 1e-9
    n_points = args.n_points or DEFAULT_GRID_POINTS
    points = sweep(base, args.axis, values, tol=tol, n_points=n_points,
                   threads=args.threads or 4)
    summary = []
    failures = 0
    for pt in points:
        if pt.trajectory is None:
            failures += 1
            summary.append({"value": pt.value, "error": pt.error})
            print(f"  {args.axis}={pt.value}: FAILED ({pt.error})", file=sys.stderr)
            continue
        digest = pt.trajectory.meta["digest"]
        path = outdir / f"run-{digest}.csv"
        csv_hash = write_csv(pt.trajectory, path)
        summary.append({"value": pt.value, "csv": path.name, "sha256": csv_hash})
        print(f"  {args.axis}={pt.value}: {path.name}")
    (outdir / "sweep.json").write_text(
        json.dumps({"preset": base.name, "axis": args.axis, "points": summary},
                   indent=2, sort_keys=True) + "\n"
    )
    print(f"sweep complete: {len(points) - failures}/{len(points)} points, dir {outdir}")
    return _EXIT_OK


def _cmd_presets(_args) -> int:
    for name in preset_names():
        sc = preset(name)
        p = sc.params
        print(
            f"{name:8s} order={sc.order.value:8s} t_end={sc.t_end:<5g} "
            f"omega0={p.omega0:<8g} omega={p.omega:<6g} rabi={p.rabi:<8g} "
            f"phase={p.phase:g}"
        )
    return _EXIT_OK


def _cmd_check(_args) -> int:
    results = run_all()
    worst = _EXIT_OK
    for res in results:
        tag = "ok  " if res.passed else "FAIL"
        print(f"{tag} {res.name:24s} {res.detail}")
        if not res.passed:
            worst = _EXIT_INVARIANT
    return worst


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qudecay",
        description="Spontaneous emission of a two-level emitter under strong "
                    "low-frequency driving",
    )
    ap.add_argument("--version", action="version", version=f"qudecay {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help=f"named preset ({', '.join(preset_names())})")
    common.add_argument("--config", help="flat JSON config file (SI units)")
    common.add_argument("--order", choices=["2", "8", "standard"], help="model override")
    common.add_argument("--t-end", dest="t_end", type=float, help="horizon in units of 1/gamma")
    common.add_argument("--tol", type=float, help="integrator relative tolerance")
    common.add_argument("--include-h0", dest="include_h0", action="store_true",
                        help="keep the off-resonant coherent term (slow)")
    common.add_argument("--n-points", dest="n_points", type=int,
                        help=f"reporting grid size (default {DEFAULT_GRID_POINTS})")
    common.add_argument("--out", help="output CSV path (directory for sweep)")
    common.add_argument("--plot-script", dest="plot_script", action="store_true",
                        help="also write a gnuplot script next to the CSV")
    common.add_argument("--threads", type=int, help="parallel workers for fan-out commands")

    sub.add_parser("simulate", parents=[common], help="run one trajectory").set_defaults(
        fn=_cmd_simulate)
    sub.add_parser("rate", parents=[common], help="emit gbar(t)/gamma samples").set_defaults(
        fn=_cmd_rate)
    cmp_p = sub.add_parser("compare", parents=[common],
                           help="transformed vs reference model on a shared grid")
    cmp_p.add_argument("--vs", help="second preset (default: standard twin of --preset)")
    cmp_p.set_defaults(fn=_cmd_compare)
    sw = sub.add_parser("sweep", parents=[common], help="run a preset across an axis")
    sw.add_argument("--axis", choices=["rabi", "omega", "phase", "order"])
    sw.add_argument("--values", help="comma-separated values for the axis")
    sw.set_defaults(fn=_cmd_sweep)
    sub.add_parser("presets", help="list named presets").set_defaults(fn=_cmd_presets)
    sub.add_parser("check", help="run the quick invariant suite").set_defaults(fn=_cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (RegimeError, ResourceLimit, ValueError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    except InvariantBreach as exc:
        print(f"error: invariant: {exc}", file=sys.stderr)
        return _EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
