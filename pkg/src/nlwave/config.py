"""JSON run configurations: strict validation and the preset catalogue.

Every command reads one JSON object.  Unknown keys are rejected so that a
mistyped parameter never silently falls back to a default.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .analysis import MANUFACTURED
from .assembly import A2_MODES
from .basis import legendre_eval, to_reference
from .errors import ConfigError
from .evolve import SCHEMES
from .kernel import KernelSpec

SOLVERS = ("galerkin", "collocation1d", "midpoint2d")
GRID_TYPES = ("singleGauss", "compositeGauss", "uniformMidpoint")

RUN_KEYS = {
    "solver", "domain", "kernel", "rho", "N", "quadrature", "a2Mode", "grid", "scheme",
    "dt", "T", "snapshotTimes", "u0", "v0", "g", "sampleGrid",
}
PHYSICAL_KEYS = ("domain", "kernel", "rho", "u0", "v0", "g", "T", "snapshotTimes")


def load(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


# --- scalar helpers ---------------------------------------------------------

def _where(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _check_keys(obj: dict, allowed, path: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"{_where(path, unknown[0])}: unknown key")


def _number(obj: dict, key: str, path: str, default=None, *, positive=False, nonneg=False) -> float:
    if key not in obj:
        if default is None:
            raise ConfigError(f"{_where(path, key)}: required")
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{_where(path, key)}: expected a finite number")
    if positive and not val > 0:
        raise ConfigError(f"{_where(path, key)}: must be > 0")
    if nonneg and not val >= 0:
        raise ConfigError(f"{_where(path, key)}: must be >= 0")
    return float(val)


def _integer(obj: dict, key: str, path: str, default=None, *, minimum=None) -> int:
    if key not in obj:
        if default is None:
            raise ConfigError(f"{_where(path, key)}: required")
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{_where(path, key)}: expected an integer")
    if minimum is not None and val < minimum:
        raise ConfigError(f"{_where(path, key)}: must be >= {minimum}")
    return val


def _choice(obj: dict, key: str, path: str, choices, default=None) -> str:
    val = obj.get(key, default)
    if val is None:
        raise ConfigError(f"{_where(path, key)}: required")
    if val not in choices:
        raise ConfigError(f"{_where(path, key)}: expected one of {list(choices)}, got {val!r}")
    return val


def _number_list(obj: dict, key: str, path: str, *, positive=False, min_len=1, integer=False) -> list:
    if key not in obj:
        raise ConfigError(f"{_where(path, key)}: required")
    vals = obj[key]
    if not isinstance(vals, list):
        raise ConfigError(f"{_where(path, key)}: expected a list")
    if len(vals) < min_len:
        raise ConfigError(f"{_where(path, key)}: needs at least {min_len} entries")
    out = []
    for i, v in enumerate(vals):
        ok = isinstance(v, int) if integer else isinstance(v, (int, float))
        if isinstance(v, bool) or not ok or not math.isfinite(v):
            raise ConfigError(f"{_where(path, key)}[{i}]: expected {'an integer' if integer else 'a number'}")
        if positive and not v > 0:
            raise ConfigError(f"{_where(path, key)}[{i}]: must be > 0")
        out.append(int(v) if integer else float(v))
    return out


# --- structured pieces ------------------------------------------------------

def parse_kernel(obj, path: str = "kernel") -> KernelSpec:
    _check_keys(obj, {"family", "s", "delta", "periodic", "period", "wrapRadius"}, path)
    _choice(obj, "family", path, ("gaussian",), "gaussian")
    if ("s" in obj) == ("delta" in obj):
        raise ConfigError(f"{path}: give exactly one of s or delta")
    periodic = obj.get("periodic", False)
    if not isinstance(periodic, bool):
        raise ConfigError(f"{path}.periodic: expected true or false")
    period = _number(obj, "period", path, positive=True) if periodic else None
    if not periodic and "period" in obj:
        raise ConfigError(f"{path}.period: only allowed for a periodic kernel")
    wrap = _integer(obj, "wrapRadius", path, minimum=0) if "wrapRadius" in obj else None
    kwargs = dict(periodic=periodic, period=period, wrap_radius=wrap)
    if "s" in obj:
        return KernelSpec(_number(obj, "s", path, positive=True), **kwargs)
    return KernelSpec.from_delta(_number(obj, "delta", path, positive=True), **kwargs)


def kernel_record(spec: KernelSpec) -> dict:
    return {
        "family": spec.family, "s": spec.s, "delta": spec.delta, "periodic": spec.periodic,
        "period": spec.period, "wrapRadius": spec.wrap_radius,
    }


def parse_domain(obj, path: str = "domain") -> tuple[float, float]:
    if obj is None:
        return (-1.0, 1.0)
    _check_keys(obj, {"lo", "hi"}, path)
    lo, hi = _number(obj, "lo", path), _number(obj, "hi", path)
    if not lo < hi:
        raise ConfigError(f"{path}: lo must be < hi")
    return (lo, hi)


def _center(obj, path, dim):
    c = obj.get("center", 0.0 if dim == 1 else [0.5, 0.5])
    if dim == 1:
        if isinstance(c, bool) or not isinstance(c, (int, float)):
            raise ConfigError(f"{path}.center: expected a number")
        return float(c)
    if not (isinstance(c, list) and len(c) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in c)):
        raise ConfigError(f"{path}.center: expected [x, y]")
    return [float(v) for v in c]


def parse_initial(obj, path: str, dim: int, domain, *, allow_zero: bool):
    """Validate an initial-data preset; returns (callable or None, resolved descriptor)."""
    if obj is None:
        if allow_zero:
            return None, {"preset": "zero"}
        raise ConfigError(f"{path}: required")
    if not isinstance(obj, dict) or "preset" not in obj:
        raise ConfigError(f"{path}: expected an object with a 'preset' key")
    preset = obj["preset"]
    if preset == "zero" and allow_zero:
        _check_keys(obj, {"preset"}, path)
        return None, {"preset": "zero"}
    if preset == "gaussianBump":
        _check_keys(obj, {"preset", "amp", "width", "center"}, path)
        amp = _number(obj, "amp", path, 1.0)
        width = _number(obj, "width", path, positive=True)
        center = _center(obj, path, dim)
        desc = {"preset": preset, "amp": amp, "width": width, "center": center}
        if dim == 1:
            return (lambda x: amp * np.exp(-np.square((x - center) / width))), desc
        cx, cy = center
        return (lambda p: amp * np.exp(-((p[:, 0] - cx) ** 2 + (p[:, 1] - cy) ** 2) / width ** 2)), desc
    if preset == "constant" and not allow_zero:
        _check_keys(obj, {"preset", "c"}, path)
        c = _number(obj, "c", path)
        return (lambda x: np.full(np.shape(x)[0], c)), {"preset": preset, "c": c}
    if preset == "legendreMode" and not allow_zero:
        if dim != 1:
            raise ConfigError(f"{path}.preset: legendreMode is one-dimensional")
        _check_keys(obj, {"preset", "k"}, path)
        k = _integer(obj, "k", path, minimum=0)
        return (lambda x: legendre_eval(k, to_reference(x, domain))), {"preset": preset, "k": k}
    allowed = ["zero", "gaussianBump"] if allow_zero else ["gaussianBump", "legendreMode", "constant"]
    raise ConfigError(f"{path}.preset: expected one of {allowed}, got {preset!r}")


def parse_forcing(obj, path: str, dim: int):
    """Returns (kind, parameters) for the forcing preset; the caller builds the callable."""
    if obj is None:
        return "none", {"preset": "none"}
    if not isinstance(obj, dict) or "preset" not in obj:
        raise ConfigError(f"{path}: expected an object with a 'preset' key")
    preset = obj["preset"]
    if preset == "none":
        _check_keys(obj, {"preset"}, path)
        return "none", {"preset": "none"}
    if preset == "cosine":
        _check_keys(obj, {"preset", "amp", "freq"}, path)
        return "cosine", {"preset": preset, "amp": _number(obj, "amp", path),
                          "freq": _number(obj, "freq", path, 1.0)}
    if preset == "manufactured":
        if dim != 1:
            raise ConfigError(f"{path}.preset: manufactured forcing is one-dimensional")
        _check_keys(obj, {"preset", "id"}, path)
        return "manufactured", {"preset": preset, "id": _choice(obj, "id", path, tuple(MANUFACTURED))}
    raise ConfigError(f"{path}.preset: expected one of ['none', 'cosine', 'manufactured'], got {preset!r}")


def cosine_forcing(amp: float, freq: float, dim: int = 1):
    if dim == 1:
        return lambda x, t: amp * np.cos(2.0 * np.pi * freq * x)
    return lambda p, t: amp * np.cos(2.0 * np.pi * freq * p[:, 0])


def parse_times(cfg: dict, path: str = "") -> tuple[float, float, list[float]]:
    dt = _number(cfg, "dt", path, positive=True)
    T = _number(cfg, "T", path, nonneg=True)
    if "snapshotTimes" in cfg:
        times = _number_list(cfg, "snapshotTimes", path)
        for i, t in enumerate(times):
            if t < 0 or t > T + 1e-12:
                raise ConfigError(f"{_where(path, 'snapshotTimes')}[{i}]: outside [0, T]")
            if abs(round(t / dt) * dt - t) > 1e-9:
                raise ConfigError(f"{_where(path, 'snapshotTimes')}[{i}]: not a multiple of dt")
        times = sorted(set(times))
    else:
        times = [0.0, T] if T > 0 else [0.0]
    if abs(round(T / dt) * dt - T) > 1e-9:
        raise ConfigError(f"{_where(path, 'T')}: not a multiple of dt")
    return dt, T, times


def parse_run(cfg: dict, path: str = "") -> dict:
    """Validate a run block and resolve its defaults."""
    _check_keys(cfg, RUN_KEYS, path)
    solver = _choice(cfg, "solver", path, SOLVERS)
    dim = 2 if solver == "midpoint2d" else 1
    res: dict[str, Any] = {"solver": solver}
    if dim == 2 and "domain" in cfg:
        raise ConfigError(f"{_where(path, 'domain')}: midpoint2d always runs on the unit torus")
    res["domain"] = parse_domain(cfg.get("domain"), _where(path, "domain")) if dim == 1 else ((0.0, 1.0), (0.0, 1.0))
    if "kernel" not in cfg:
        raise ConfigError(f"{_where(path, 'kernel')}: required")
    spec = parse_kernel(cfg["kernel"], _where(path, "kernel"))
    if dim == 2:
        if not spec.periodic:
            spec = KernelSpec(spec.s, periodic=True, period=1.0, wrap_radius=spec.wrap_radius)
        elif spec.period != 1.0:
            raise ConfigError(f"{_where(path, 'kernel')}.period: must be 1 on the unit torus")
    res["kernel"] = spec
    res["rho"] = _number(cfg, "rho", path, nonneg=True)
    res["dt"], res["T"], res["snapshotTimes"] = parse_times(cfg, path)
    res["g_kind"], res["g_desc"] = parse_forcing(cfg.get("g"), _where(path, "g"), dim)
    if res["g_kind"] == "manufactured":
        # the manufactured solution fixes the initial data
        for key in ("u0", "v0"):
            if key in cfg:
                raise ConfigError(f"{_where(path, key)}: not allowed with manufactured forcing")
        res["u0"], res["v0"] = None, None
        res["u0_desc"] = res["v0_desc"] = {"preset": "manufactured", "id": res["g_desc"]["id"]}
    else:
        res["u0"], res["u0_desc"] = parse_initial(cfg.get("u0"), _where(path, "u0"), dim, res["domain"], allow_zero=False)
        res["v0"], res["v0_desc"] = parse_initial(cfg.get("v0"), _where(path, "v0"), dim, res["domain"], allow_zero=True)

    only = {
        "galerkin": {"N", "quadrature", "a2Mode", "sampleGrid", "scheme"},
        "collocation1d": {"grid", "scheme"},
        "midpoint2d": {"grid"},
    }[solver]
    for key in ("N", "quadrature", "a2Mode", "sampleGrid", "scheme", "grid"):
        if key in cfg and key not in only:
            raise ConfigError(f"{_where(path, key)}: not used by solver {solver!r}")

    if solver == "galerkin":
        res["N"] = _integer(cfg, "N", path, minimum=0)
        res["a2Mode"] = _choice(cfg, "a2Mode", path, A2_MODES, "exactMass")
        q = cfg.get("quadrature", {})
        qp = _where(path, "quadrature")
        _check_keys(q, {"points", "panels"}, qp)
        res["quadrature"] = {
            "points": _integer(q, "points", qp, minimum=1) if "points" in q else None,
            "panels": _integer(q, "panels", qp, minimum=1) if "panels" in q else None,
        }
        sg = cfg.get("sampleGrid", {})
        sp = _where(path, "sampleGrid")
        _check_keys(sg, {"points"}, sp)
        res["sampleGrid"] = {"points": _integer(sg, "points", sp, 201, minimum=2)}
    if solver in ("galerkin", "collocation1d"):
        res["scheme"] = _choice(cfg, "scheme", path, SCHEMES, "paperImplicit")
    if solver == "collocation1d":
        res["grid"] = parse_grid_1d(cfg.get("grid"), _where(path, "grid"))
        if res["grid"].get("periodic"):
            width = res["domain"][1] - res["domain"][0]
            if not spec.periodic or abs(spec.period - width) > 1e-14:
                raise ConfigError(f"{_where(path, 'kernel')}.period: a periodic grid needs a periodic kernel "
                                  "with period equal to the domain width")
    if solver == "midpoint2d":
        g = cfg.get("grid")
        gp = _where(path, "grid")
        if g is None:
            raise ConfigError(f"{gp}: required")
        _check_keys(g, {"cells"}, gp)
        res["grid"] = {"cells": _integer(g, "cells", gp, minimum=4)}
    return res


def parse_grid_1d(g, path: str) -> dict:
    if g is None:
        raise ConfigError(f"{path}: required")
    if not isinstance(g, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = _choice(g, "type", path, GRID_TYPES)
    if kind == "singleGauss":
        _check_keys(g, {"type", "points"}, path)
        return {"type": kind, "points": _integer(g, "points", path, minimum=1)}
    if kind == "compositeGauss":
        _check_keys(g, {"type", "subdomains", "points"}, path)
        return {"type": kind, "subdomains": _integer(g, "subdomains", path, minimum=1),
                "points": _integer(g, "points", path, minimum=1)}
    _check_keys(g, {"type", "cells", "periodic"}, path)
    periodic = g.get("periodic", False)
    if not isinstance(periodic, bool):
        raise ConfigError(f"{path}.periodic: expected true or false")
    return {"type": kind, "cells": _integer(g, "cells", path, minimum=1), "periodic": periodic}


def parse_convergence(cfg: dict) -> dict:
    _check_keys(cfg, {"kernel", "rho", "domain", "a2Mode", "manufactured", "T", "spatial", "temporal"}, "")
    res = {
        "kernel": parse_kernel(cfg.get("kernel"), "kernel") if "kernel" in cfg else _missing("kernel"),
        "rho": _number(cfg, "rho", "", nonneg=True),
        "domain": parse_domain(cfg.get("domain")),
        "a2Mode": _choice(cfg, "a2Mode", "", A2_MODES, "exactMass"),
        "manufactured": _choice(cfg, "manufactured", "", tuple(MANUFACTURED)),
        "T": _number(cfg, "T", "", positive=True),
    }
    if "spatial" not in cfg and "temporal" not in cfg:
        raise ConfigError("spatial: at least one of spatial or temporal sweeps is required")
    if "spatial" in cfg:
        s = cfg["spatial"]
        _check_keys(s, {"Ns", "dt", "scheme"}, "spatial")
        dt = _number(s, "dt", "spatial", positive=True)
        if abs(round(res["T"] / dt) * dt - res["T"]) > 1e-9:
            raise ConfigError("spatial.dt: T is not a multiple of dt")
        res["spatial"] = {"Ns": _number_list(s, "Ns", "spatial", positive=True, min_len=2, integer=True),
                          "dt": dt, "scheme": _choice(s, "scheme", "spatial", SCHEMES, "explicitCentral")}
    if "temporal" in cfg:
        t = cfg["temporal"]
        _check_keys(t, {"dts", "N", "scheme"}, "temporal")
        dts = _number_list(t, "dts", "temporal", positive=True, min_len=2)
        for i, dt in enumerate(dts):
            if abs(round(res["T"] / dt) * dt - res["T"]) > 1e-9:
                raise ConfigError(f"temporal.dts[{i}]: T is not a multiple of dt")
        res["temporal"] = {"dts": dts, "N": _integer(t, "N", "temporal", minimum=1),
                           "scheme": _choice(t, "scheme", "temporal", SCHEMES, "averagedImplicit")}
    return res


def _missing(key):
    raise ConfigError(f"{key}: required")


def parse_stability(cfg: dict) -> dict:
    _check_keys(cfg, {"kernel", "rho", "domain", "a2Mode", "Ns", "dts", "schemes", "powerIteration"}, "")
    if "kernel" not in cfg:
        _missing("kernel")
    schemes = cfg.get("schemes", ["paperImplicit"])
    if not isinstance(schemes, list) or not schemes:
        raise ConfigError("schemes: expected a non-empty list")
    for i, s in enumerate(schemes):
        if s not in SCHEMES:
            raise ConfigError(f"schemes[{i}]: expected one of {list(SCHEMES)}, got {s!r}")
    power = cfg.get("powerIteration", True)
    if not isinstance(power, bool):
        raise ConfigError("powerIteration: expected true or false")
    return {
        "kernel": parse_kernel(cfg["kernel"]),
        "rho": _number(cfg, "rho", "", nonneg=True),
        "domain": parse_domain(cfg.get("domain")),
        "a2Mode": _choice(cfg, "a2Mode", "", A2_MODES, "exactMass"),
        "Ns": _number_list(cfg, "Ns", "", positive=True, integer=True),
        "dts": _number_list(cfg, "dts", "", positive=True),
        "schemes": list(dict.fromkeys(schemes)),
        "powerIteration": power,
    }


def parse_compare(cfg: dict) -> dict:
    """``problem`` holds the physical setup, ``solvers`` two discretization blocks.

    A block may repeat a physical key (for instance ``domain``), but only with
    the problem's value.
    """
    _check_keys(cfg, {"problem", "solvers"}, "")
    problem = cfg.get("problem")
    if not isinstance(problem, dict):
        raise ConfigError("problem: required object")
    _check_keys(problem, set(PHYSICAL_KEYS) | {"dt"}, "problem")
    blocks = cfg.get("solvers")
    if not isinstance(blocks, list) or len(blocks) != 2:
        raise ConfigError("solvers: expected a list of exactly two solver blocks")
    runs = []
    for i, block in enumerate(blocks):
        path = f"solvers[{i}]"
        if not isinstance(block, dict):
            raise ConfigError(f"{path}: expected an object")
        for key in set(PHYSICAL_KEYS) | {"dt"}:
            if key in block and key in problem and block[key] != problem[key]:
                raise ConfigError(f"{path}.{key}: does not match problem.{key}")
        merged = {**problem, **block}
        run = parse_run(merged, path)
        if run["solver"] == "midpoint2d":
            raise ConfigError(f"{path}.solver: compare supports the 1-D solvers only")
        runs.append(run)
    a, b = runs
    if a["domain"] != b["domain"]:
        raise ConfigError("solvers[1].domain: does not match solvers[0].domain")
    if a["snapshotTimes"] != b["snapshotTimes"]:
        raise ConfigError("solvers[1].snapshotTimes: does not match solvers[0].snapshotTimes")
    return {"solvers": runs}
