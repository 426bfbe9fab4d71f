"""Command line entry point: ``nlwave run|convergence|stability|compare <config.json>``.

Exit codes: 0 success, 1 stability FAIL, 2 config error, 3 solver error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, analysis, config, evolve
from .analysis import MANUFACTURED, ManufacturedForcing
from .assembly import build_system, default_rule
from .basis import composite_gauss_rule
from .collocation import (NodalSystem, composite_grid, gauss_grid, midpoint_grid,
                          run_midpoint_2d)
from .errors import ConfigError, NlwaveError
from .kernel import kernel_mass

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3
STABILITY_TOL = 1e-8
MASS_WARN = 0.999


# --- output -----------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _csv_text(header, rows, trailer: str | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    if trailer:
        buf.write(trailer + "\n")
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _write_atomic(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(out_dir: Path, files: dict[str, str]):
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in sorted(files):
        _write_atomic(out_dir / name, files[name])


def _meta_text(meta: dict) -> str:
    return json.dumps(_jsonable(meta), indent=2, sort_keys=True, allow_nan=False) + "\n"


# --- building solvers from resolved run blocks --------------------------------

def _resolved_record(run: dict) -> dict:
    rec = {k: v for k, v in run.items() if k not in ("u0", "v0", "kernel", "u0_desc", "v0_desc", "g_kind", "g_desc")}
    rec["kernel"] = config.kernel_record(run["kernel"])
    rec["u0"], rec["v0"], rec["g"] = run["u0_desc"], run["v0_desc"], run["g_desc"]
    return rec


def _forcing(run: dict, ref_rule_fn):
    kind, desc = run["g_kind"], run["g_desc"]
    if kind == "none":
        return None
    dim = 2 if run["solver"] == "midpoint2d" else 1
    if kind == "cosine":
        return config.cosine_forcing(desc["amp"], desc["freq"], dim)
    sol = MANUFACTURED[desc["id"]]()
    return ManufacturedForcing(sol, run["kernel"], run["rho"], ref_rule_fn())


def _initial(run: dict):
    if run["g_kind"] == "manufactured":
        sol = MANUFACTURED[run["g_desc"]["id"]]()
        return (lambda x: sol.u(x, 0.0)), (lambda x: sol.u_t(x, 0.0))
    return run["u0"], run["v0"]


def _grid_1d(run: dict):
    lo, hi = run["domain"]
    g = run["grid"]
    if g["type"] == "singleGauss":
        return gauss_grid(lo, hi, g["points"])
    if g["type"] == "compositeGauss":
        return composite_grid(lo, hi, g["subdomains"], g["points"])
    return midpoint_grid(lo, hi, g["cells"], g["periodic"])


def _galerkin_system(run: dict):
    lo, hi = run["domain"]
    q = run["quadrature"]
    rule = default_rule(run["kernel"], run["N"], lo, hi, points=q["points"], panels=q["panels"])
    q["points"], q["panels"] = len(rule) // rule.panels, rule.panels
    per = len(rule) // rule.panels

    def ref():
        return composite_gauss_rule(lo, hi, 4 * rule.panels, per)

    g = _forcing(run, ref)
    return build_system(run["kernel"], run["N"], run["rho"], g, run["a2Mode"], rule)


def _nodal_system(run: dict):
    grid = _grid_1d(run)
    lo, hi = run["domain"]

    def ref():
        base = default_rule(run["kernel"], 16, lo, hi)
        return composite_gauss_rule(lo, hi, 4 * base.panels, len(base) // base.panels)

    return NodalSystem(run["kernel"], grid, run["rho"], _forcing(run, ref))


def _simulate_1d(run: dict, sample=None):
    """Returns (snapshots, system, quadrature weights of the sample points)."""
    u0, v0 = _initial(run)
    if run["solver"] == "galerkin":
        system = _galerkin_system(run)
        if sample is None:
            lo, hi = run["domain"]
            sample = np.linspace(lo, hi, run["sampleGrid"]["points"])
        weights = analysis.trapezoid_weights(sample)
    else:
        system = _nodal_system(run)
        if sample is not None and not np.array_equal(sample, system.grid.points):
            raise ConfigError("solvers: two collocation blocks must share one grid")
        sample, weights = system.grid.points, system.grid.weights
    snaps = evolve.run(system, u0, v0, run["dt"], run["T"], sample, run["snapshotTimes"],
                       run["scheme"], weights=weights)
    return snaps, system


def _normalization(run: dict) -> tuple[dict, list[str]]:
    spec = run["kernel"]
    if run["solver"] == "midpoint2d":
        return {"periodic": True, "centralMass": 1.0,
                "note": "periodized kernel integrates to one over the torus"}, []
    lo, hi = run["domain"]
    xs = np.array([lo, 0.5 * (lo + hi), hi])
    masses = kernel_mass(spec, xs, lo, hi)
    central = float(masses[1])
    warnings = []
    if central < MASS_WARN:
        warnings.append(f"kernel mass over the domain is {central:.6g} < {MASS_WARN}: "
                        "the kernel is truncated by the domain")
    return {"centralMass": central, "edgeMass": float(min(masses[0], masses[2])),
            "delta": spec.delta, "domainWidth": hi - lo}, warnings


def _kernel_rec(spec):
    return config.kernel_record(spec)


# --- commands ----------------------------------------------------------------

def cmd_run(cfg: dict, out_dir: Path, log) -> int:
    run = config.parse_run(cfg)
    norm, warnings = _normalization(run)
    meta = {"command": "run", "version": __version__, "kernelNormalization": norm, "warnings": warnings}
    if run["solver"] == "midpoint2d":
        n = run["grid"]["cells"]
        g = _forcing(run, None)
        snaps = run_midpoint_2d(run["kernel"], n, run["rho"], run["u0"], run["v0"], run["dt"], run["T"],
                                g, run["snapshotTimes"])
        rows = [(s.t, p[0], p[1], u) for s in snaps for p, u in zip(s.xs, s.us)]
        header = ["t", "x", "y", "u"]
        meta["bounds"] = None
    else:
        snaps, system = _simulate_1d(run)
        rows = [(s.t, x, u) for s in snaps for x, u in zip(s.xs, s.us)]
        header = ["t", "x", "u"]
        meta["bounds"] = analysis.bounds_report(system).as_dict() if run["solver"] == "galerkin" else None
    meta["resolved"] = _resolved_record(run)
    for w in warnings:
        log(f"warning: {w}")
    _emit(out_dir, {"snapshots.csv": _csv_text(header, rows), "meta.json": _meta_text(meta)})
    log(f"run: {len(snaps)} snapshots written to {out_dir}")
    return EXIT_OK


def cmd_convergence(cfg: dict, out_dir: Path, log) -> int:
    c = config.parse_convergence(cfg)
    sol = MANUFACTURED[c["manufactured"]]()
    sp, tp = c.get("spatial"), c.get("temporal")
    rows, reports = [], {}
    if sp:
        rep, _ = analysis.manufactured_study(sol, c["kernel"], c["rho"], sp["Ns"], [], c["T"],
                                             dt_spatial=sp["dt"], spatial_scheme=sp["scheme"],
                                             domain=c["domain"], mode=c["a2Mode"])
        rows.extend(rep.rows())
        reports["spatial"] = rep
    if tp:
        _, rep = analysis.manufactured_study(sol, c["kernel"], c["rho"], [], tp["dts"], c["T"],
                                             N_temporal=tp["N"], temporal_scheme=tp["scheme"],
                                             domain=c["domain"], mode=c["a2Mode"])
        rows.extend(rep.rows())
        reports["temporal"] = rep
    trailer = None
    if tp:
        trailer = f"# fittedOrder temporalDt {tp['scheme']} {_fmt(reports['temporal'].fitted_order)}"
    meta = {
        "command": "convergence", "version": __version__,
        "resolved": {**{k: v for k, v in c.items() if k != "kernel"}, "kernel": _kernel_rec(c["kernel"])},
        "spatialAccelL2": reports["spatial"].err_accel_l2 if sp else None,
        "temporalFittedOrder": reports["temporal"].fitted_order if tp else None,
        "warnings": [],
    }
    _emit(out_dir, {"convergence.csv": _csv_text(["axis", "resolution", "errL2", "errLinf"], rows, trailer),
                    "meta.json": _meta_text(meta)})
    if trailer:
        log(trailer[2:])
    return EXIT_OK


def cmd_stability(cfg: dict, out_dir: Path, log) -> int:
    c = config.parse_stability(cfg)
    rows, fails = [], 0
    for N in c["Ns"]:
        system = build_system(c["kernel"], N, c["rho"], None, c["a2Mode"], domain=c["domain"])
        for scheme in c["schemes"]:
            for dt in c["dts"]:
                rep = evolve.spectral_radius_report(system, dt, scheme, power=c["powerIteration"])
                if scheme == "paperImplicit":
                    status = "FAIL" if rep.radius > 1.0 + STABILITY_TOL else "PASS"
                    fails += status == "FAIL"
                else:
                    status = "info"
                rows.append((scheme, N, dt, rep.radius, rep.power_estimate, status))
    meta = {
        "command": "stability", "version": __version__,
        "resolved": {**{k: v for k, v in c.items() if k != "kernel"}, "kernel": _kernel_rec(c["kernel"])},
        "tolerance": STABILITY_TOL, "failures": fails, "warnings": [],
    }
    _emit(out_dir, {"stability.csv": _csv_text(["scheme", "N", "dt", "radius", "powerEstimate", "status"], rows),
                    "meta.json": _meta_text(meta)})
    log(f"stability: {len(rows)} cases, {fails} FAIL")
    return EXIT_FAIL if fails else EXIT_OK


def cmd_compare(cfg: dict, out_dir: Path, log) -> int:
    a, b = config.parse_compare(cfg)["solvers"]
    # compare at collocation nodes when one block has them
    if a["solver"] == "galerkin" and b["solver"] != "galerkin":
        a, b, swapped = b, a, True
    else:
        swapped = False
    snaps_a, _ = _simulate_1d(a)
    snaps_b, _ = _simulate_1d(b, sample=snaps_a[0].xs)
    if swapped:
        a, b, snaps_a, snaps_b = b, a, snaps_b, snaps_a
    rows = []
    for sa, sb in zip(snaps_a, snaps_b):
        w = sa.weights if sa.weights is not None else sb.weights
        d = sa.us - sb.us
        rows.append((sa.t, float(np.max(np.abs(d))), float(np.sqrt(np.dot(w, d * d)))))
    meta = {"command": "compare", "version": __version__,
            "resolved": [_resolved_record(a), _resolved_record(b)], "warnings": []}
    _emit(out_dir, {"compare.csv": _csv_text(["t", "errLinf", "errL2"], rows), "meta.json": _meta_text(meta)})
    if rows:
        log(f"compare: final Linf gap {rows[-1][1]:.3e}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "convergence": cmd_convergence, "stability": cmd_stability, "compare": cmd_compare}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nlwave", description="Nonlocal elastic wave solver")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("config", help="JSON configuration file")
    parser.add_argument("--out", default=None, help="output directory (default: ./nlwave-out/<config name>)")
    parser.add_argument("--quiet", action="store_true", help="suppress progress messages")
    args = parser.parse_args(argv)

    def log(msg):
        if not args.quiet:
            print(msg, file=sys.stderr)

    out_dir = Path(args.out) if args.out else Path("nlwave-out") / Path(args.config).stem
    try:
        cfg = config.load(args.config)
        return COMMANDS[args.command](cfg, out_dir, log)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NlwaveError, np.linalg.LinAlgError) as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
