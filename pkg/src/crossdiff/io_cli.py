"""Config parsing, CSV emission, and the command-line entry points.

Configs are JSON documents with the fixed sections grid/params/stepper/
initial/run and an optional full_model block; unknown keys are rejected with
their dotted path. Outputs are plain CSV (LF line endings, shortest
round-trip float formatting, '#' comments only as trailing metadata), written
atomically via a temp file and rename so interrupted runs never leave
truncated files. Exit codes: 0 success, 2 usage/config, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from pathlib import Path

import numpy as np

from .energetics import CSV_HEADER, make_report
from .errors import ConfigError, SolverError
from .grid import Field, GridSpec, mean_value
from .integrate import (FullModelConfig, InitialCondition, RunConfig, SpeciesInit,
                        StepperConfig, run_simulation)
from .model import FullState, ModelParams, SystemState
from .stability import growth_rates, neumann_wavenumbers, stability_threshold

_SNAPSHOT_NAME = re.compile(r"snapshot_t([0-9eE+.\-]+)\.csv$")


# ---------------------------------------------------------------------------
# config schema
# ---------------------------------------------------------------------------

def _require_mapping(data, path):
    if not isinstance(data, dict):
        raise ConfigError("expected a JSON object", path=path)


def _check_keys(data, allowed, required, path):
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", path=f"{path}.{key}" if path else key)
    for key in required:
        if key not in data:
            raise ConfigError(f"missing required key {key!r}", path=path or key)


def _build(path, builder, **kwargs):
    try:
        return builder(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path=path) from exc


def _parse_species(data, path) -> SpeciesInit:
    _require_mapping(data, path)
    _check_keys(data, {"kind", "baseline", "amplitude", "center", "width"},
                {"kind", "baseline"}, path)
    kwargs = {"kind": data["kind"], "baseline": data["baseline"]}
    if "amplitude" in data:
        kwargs["amplitude"] = data["amplitude"]
    if "center" in data:
        kwargs["center"] = tuple(data["center"])
    if "width" in data:
        kwargs["width"] = data["width"]
    return _build(path, SpeciesInit, **kwargs)


def parse_config(data: dict) -> RunConfig:
    """Validate a raw config dict and build the RunConfig."""
    _require_mapping(data, "")
    _check_keys(data, {"grid", "params", "stepper", "initial", "run", "full_model"},
                {"grid", "params", "initial", "run"}, "")

    gd = data["grid"]
    _require_mapping(gd, "grid")
    _check_keys(gd, {"dim", "lengths", "cells"}, {"dim", "lengths", "cells"}, "grid")
    grid = _build("grid", GridSpec, lengths=tuple(gd["lengths"]),
                  cells=tuple(gd["cells"]))
    if grid.dim != int(gd["dim"]):
        raise ConfigError(f"dim={gd['dim']} inconsistent with "
                          f"{len(gd['lengths'])} axis entries", path="grid.dim")

    pd = data["params"]
    _require_mapping(pd, "params")
    _check_keys(pd, {"beta", "c", "d0", "scaling"}, {"beta", "c"}, "params")
    scaling = pd.get("scaling", "physical")
    d0 = pd.get("d0", 1.0 if scaling == "scaled" else 0.25)
    params = _build("params", ModelParams, beta=pd["beta"], c=pd["c"],
                    d0=d0, scaling=scaling)

    sd = data.get("stepper", {})
    _require_mapping(sd, "stepper")
    _check_keys(sd, {"scheme", "cfl_safety", "dt_max", "dt_init", "tol_negative"},
                set(), "stepper")
    stepper = _build("stepper", StepperConfig, **sd)

    idd = data["initial"]
    _require_mapping(idd, "initial")
    _check_keys(idd, {"rho_a", "rho_b"}, {"rho_a", "rho_b"}, "initial")
    initial = InitialCondition(rho_a=_parse_species(idd["rho_a"], "initial.rho_a"),
                               rho_b=_parse_species(idd["rho_b"], "initial.rho_b"))

    rd = data["run"]
    _require_mapping(rd, "run")
    _check_keys(rd, {"t_end", "output_every", "snapshot_times"},
                {"t_end", "output_every"}, "run")

    full = None
    if "full_model" in data:
        fd = data["full_model"]
        _require_mapping(fd, "full_model")
        _check_keys(fd, {"enabled", "epsilon"}, {"enabled"}, "full_model")
        full = _build("full_model", FullModelConfig, enabled=bool(fd["enabled"]),
                      epsilon=fd.get("epsilon", 1.0))

    return _build("run", RunConfig, grid=grid, params=params, stepper=stepper,
                  initial=initial, t_end=rd["t_end"],
                  output_every=rd["output_every"],
                  snapshot_times=tuple(rd.get("snapshot_times", ())),
                  full_model=full)


def config_to_dict(cfg: RunConfig) -> dict:
    """Fully resolved config; parse_config(config_to_dict(cfg)) == cfg."""
    out = {
        "grid": {"dim": cfg.grid.dim, "lengths": list(cfg.grid.lengths),
                 "cells": list(cfg.grid.cells)},
        "params": {"beta": cfg.params.beta, "c": cfg.params.c,
                   "d0": cfg.params.d0, "scaling": cfg.params.scaling},
        "stepper": {"scheme": cfg.stepper.scheme,
                    "cfl_safety": cfg.stepper.cfl_safety,
                    "dt_max": cfg.stepper.dt_max,
                    "dt_init": cfg.stepper.dt_init,
                    "tol_negative": cfg.stepper.tol_negative},
        "initial": {
            name: {"kind": sp.kind, "baseline": sp.baseline,
                   "amplitude": sp.amplitude, "center": list(sp.center),
                   "width": sp.width}
            for name, sp in (("rho_a", cfg.initial.rho_a), ("rho_b", cfg.initial.rho_b))
        },
        "run": {"t_end": cfg.t_end, "output_every": cfg.output_every,
                "snapshot_times": list(cfg.snapshot_times)},
    }
    if cfg.full_model is not None:
        out["full_model"] = {"enabled": cfg.full_model.enabled,
                             "epsilon": cfg.full_model.epsilon}
    return out


def apply_overrides(data: dict, overrides) -> dict:
    """Apply dotted-path key=value overrides (values parsed as JSON literals)."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form path=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"override {item!r} has an empty path")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError("path walks through a non-object", path=key)
        node[parts[-1]] = value
    return data


def load_config(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {p}: line {exc.lineno}: {exc.msg}") from exc


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_time(t: float) -> str:
    return format(float(t), ".12g")


def write_timeseries(path, reports):
    lines = [CSV_HEADER]
    for r in reports:
        lines.append(",".join(repr(float(v)) for v in r.as_row()))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def write_snapshot(path, state):
    grid = state.grid
    full = isinstance(state, FullState)
    cols = ["x"] + (["y"] if grid.dim == 2 else []) + ["rho_a", "rho_b"]
    arrays = [state.rho_a.values.ravel(), state.rho_b.values.ravel()]
    if full:
        cols += ["g_a", "g_b"]
        arrays += [state.g_a.values.ravel(), state.g_b.values.ravel()]
    meshes = [m.ravel() for m in grid.meshes()]
    lines = [",".join(cols)]
    for i in range(grid.n_cells):
        coords = [repr(float(m[i])) for m in meshes]
        vals = [repr(float(a[i])) for a in arrays]
        lines.append(",".join(coords + vals))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def _rebuild_axis(coords: np.ndarray, name: str):
    """(n, h, length) from sorted unique cell centers of a centered box."""
    n = coords.shape[0]
    if n < 3:
        raise ConfigError(f"snapshot has fewer than 3 cells along {name}")
    h = coords[1] - coords[0]
    if h <= 0 or not np.allclose(np.diff(coords), h, rtol=1e-9, atol=1e-12):
        raise ConfigError(f"snapshot {name} coordinates are not uniformly spaced")
    length = h * n
    if abs(coords[0] - (-0.5 * length + 0.5 * h)) > 1e-9 * max(1.0, length):
        raise ConfigError(f"snapshot {name} coordinates are not a centered box")
    return n, h, length


def read_snapshot(path) -> SystemState:
    """Rebuild the state from a snapshot CSV; the header and the coordinate
    columns carry the grid, so no separate grid argument is needed."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"snapshot file not found: {p}")
    lines = p.read_text(encoding="utf-8").splitlines()
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise ConfigError(f"{p}: line 1: empty snapshot")
    header = lines[0].split(",")
    known = (["x", "rho_a", "rho_b"], ["x", "y", "rho_a", "rho_b"],
             ["x", "rho_a", "rho_b", "g_a", "g_b"],
             ["x", "y", "rho_a", "rho_b", "g_a", "g_b"])
    if header not in known:
        raise ConfigError(f"{p}: line 1: unrecognized snapshot header {lines[0]!r}")
    ncols = len(header)
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        if ln.startswith("#"):
            continue
        parts = ln.split(",")
        if len(parts) != ncols:
            raise ConfigError(f"{p}: line {lineno}: expected {ncols} fields, "
                              f"got {len(parts)}")
        try:
            rows.append([float(x) for x in parts])
        except ValueError as exc:
            raise ConfigError(f"{p}: line {lineno}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{p}: line 2: snapshot has no data rows")
    arr = np.array(rows)

    dim = 2 if "y" in header else 1
    if dim == 1:
        n, h, length = _rebuild_axis(arr[:, 0], "x")
        grid = GridSpec(lengths=(length,), cells=(n,))
        shape = (n,)
    else:
        x, y = arr[:, 0], arr[:, 1]
        ny = 1
        while ny < len(x) and x[ny] == x[0]:
            ny += 1
        if ny < 3 or len(x) % ny != 0:
            raise ConfigError(f"{p}: coordinate columns are not row-major over a grid")
        nx = len(x) // ny
        xs = x.reshape(nx, ny)[:, 0]
        _, hx, lx = _rebuild_axis(xs, "x")
        _, hy, ly = _rebuild_axis(y[:ny], "y")
        if not np.array_equal(np.repeat(xs, ny), x):
            raise ConfigError(f"{p}: x coordinates are not constant per row block")
        if not np.array_equal(np.tile(y[:ny], nx), y):
            raise ConfigError(f"{p}: y coordinates are not row-major repeated")
        grid = GridSpec(lengths=(lx, ly), cells=(nx, ny))
        shape = (nx, ny)

    t = 0.0
    m = _SNAPSHOT_NAME.search(p.name)
    if m:
        try:
            t = float(m.group(1))
        except ValueError:
            t = 0.0
    coff = dim
    ra = Field(grid, arr[:, coff].reshape(shape))
    rb = Field(grid, arr[:, coff + 1].reshape(shape))
    if "g_a" in header:
        return FullState(t=t, rho_a=ra, rho_b=rb,
                         g_a=Field(grid, arr[:, coff + 2].reshape(shape)),
                         g_b=Field(grid, arr[:, coff + 3].reshape(shape)))
    return SystemState(t=t, rho_a=ra, rho_b=rb)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cli_run(config_path, out_dir, overrides=()) -> int:
    data = load_config(config_path)
    apply_overrides(data, overrides)
    cfg = parse_config(data)
    result = run_simulation(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(out / "config_resolved.json",
                  json.dumps(config_to_dict(cfg), indent=2) + "\n")
    write_timeseries(out / "timeseries.csv", result.reports)
    for snap in result.snapshots:
        write_snapshot(out / f"snapshot_t{format_time(snap.t)}.csv", snap)
    return 0


def cli_stability(beta, c, rho_a, rho_b, length, n_max, out=None) -> int:
    out = sys.stdout if out is None else out
    for name, v in (("beta", beta), ("c", c), ("rho-a", rho_a), ("rho-b", rho_b),
                    ("length", length)):
        if not (v > 0):
            raise ConfigError(f"--{name} must be positive, got {v}")
    if n_max < 1:
        raise ConfigError(f"--n-max must be at least 1, got {n_max}")
    params = ModelParams(beta=beta, c=c, d0=0.25, scaling="physical")
    grid = GridSpec(lengths=(length,), cells=(3,))
    lines = ["k,alpha_plus,alpha_minus"]
    for k in neumann_wavenumbers(grid, n_max):
        pt = growth_rates(k, (rho_a, rho_b), params)
        lines.append(f"{k!r},{pt.alpha_plus!r},{pt.alpha_minus!r}")
    lines.append(f"# threshold_beta_c={stability_threshold((rho_a, rho_b))!r}")
    out.write("\n".join(lines) + "\n")
    return 0


def cli_energies(snapshot_path, beta, c, d0, out=None) -> int:
    out = sys.stdout if out is None else out
    state = read_snapshot(snapshot_path)
    if isinstance(state, FullState):
        state = SystemState(t=state.t, rho_a=state.rho_a, rho_b=state.rho_b)
    params = ModelParams(beta=beta, c=c, d0=d0, scaling="physical")
    ss = (mean_value(state.rho_a), mean_value(state.rho_b))
    report = make_report(state, params, ss)
    row = ",".join(repr(float(v)) for v in report.as_row())
    out.write(CSV_HEADER + "\n" + row + "\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="crossdiff",
        description="Finite-volume simulator for a two-species cross-diffusion "
                    "system with energy and stability diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a config and write CSV outputs")
    p_run.add_argument("--config", required=True, help="path to the JSON config")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--override", action="append", default=[],
                       metavar="PATH=VALUE",
                       help="dotted-path config override, e.g. params.beta=0.6")

    p_st = sub.add_parser("stability",
                          help="tabulate growth rates over the admissible modes")
    p_st.add_argument("--beta", type=float, required=True)
    p_st.add_argument("--c", type=float, required=True)
    p_st.add_argument("--rho-a", type=float, required=True, dest="rho_a")
    p_st.add_argument("--rho-b", type=float, required=True, dest="rho_b")
    p_st.add_argument("--length", type=float, required=True)
    p_st.add_argument("--n-max", type=int, required=True, dest="n_max")

    p_en = sub.add_parser("energies",
                          help="recompute the diagnostic row for a stored snapshot")
    p_en.add_argument("--snapshot", required=True)
    p_en.add_argument("--beta", type=float, required=True)
    p_en.add_argument("--c", type=float, required=True)
    p_en.add_argument("--d0", type=float, required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cli_run(args.config, args.out, args.override)
        if args.command == "stability":
            return cli_stability(args.beta, args.c, args.rho_a, args.rho_b,
                                 args.length, args.n_max)
        return cli_energies(args.snapshot, args.beta, args.c, args.d0)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"error: solver: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
