"""Command-line driver: run benchmarks, convergence studies, snapshots.

Subcommands: ``aledg run --config FILE [--key value ...]``,
``aledg converge --resolutions 100,200,...``, ``aledg cases``.
Config files are line-oriented ``key = value`` with ``[section]`` headers;
flags ``--section.key value`` (or bare ``--key``) override file values.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import os
import sys
from dataclasses import fields

import numpy as np

from . import cases, scheme, solver1d, solver2d
from .config import RunConfig
from .errors import AledgError, ConfigError

# config sections are cosmetic: every key maps into the flat RunConfig
_KEY_ALIASES = {
    "flux.kind": "flux", "limiter.kind": "limiter", "limiter.m": "tvb_m",
    "limiter.M": "tvb_m", "M": "tvb_m", "m": "tvb_m",
    "smoothing.kind": "smoothing", "motion.smoothing": "smoothing",
    "motion.vertex_velocity": "vertex_velocity",
    "smoothing.alpha": "smooth_alpha", "smoothing.nsmooth": "smooth_nsmooth",
    "smoothing.eps0": "smooth_eps0", "smoothing.delta_l": "smooth_delta_l",
    "smoothing.delta_u": "smooth_delta_u",
    "smoothing.iterations": "smooth_iterations",
    "adapt.h_min": "h_min", "adapt.h_max": "h_max", "adapt.swaps": "swaps",
    "adapt.quality_threshold": "quality_threshold",
    "output.dir": "output_dir", "output.snapshot_interval": "snapshot_interval",
    "run.case": "case", "run.n": "n", "run.degree": "degree", "run.cfl": "cfl",
    "run.seed": "seed", "run.mesh_mode": "mesh_mode", "k": "degree",
}


def _coerce(field_type, raw, key):
    try:
        if field_type is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return field_type(raw)
    except ValueError as exc:
        raise ConfigError(f"malformed value {raw!r} for key {key!r}") from exc


def parse_config(path=None, overrides=()):
    """Build a RunConfig from an optional file plus flag overrides."""
    typemap = {f.name: type(f.default) for f in fields(RunConfig)}
    values = {}

    def assign(key, raw):
        name = _KEY_ALIASES.get(key, key)
        name = _KEY_ALIASES.get(name, name)
        if name not in typemap:
            # allow section-qualified direct names like motion.nu
            tail = key.split(".")[-1]
            name = _KEY_ALIASES.get(tail, tail)
        if name not in typemap:
            raise ConfigError(f"unknown config key {key!r}")
        values[name] = _coerce(typemap[name], raw, key)

    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file {path!r} does not exist")
        section = ""
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if line.startswith("[") and line.endswith("]"):
                    section = line[1:-1].strip()
                    continue
                if "=" not in line:
                    raise ConfigError(f"malformed config line {line!r}")
                key, raw = (s.strip() for s in line.split("=", 1))
                assign(f"{section}.{key}" if section else key, raw)
    it = iter(overrides)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"expected --key, got {tok!r}")
        key = tok[2:]
        try:
            raw = next(it)
        except StopIteration:
            raise ConfigError(f"flag {tok!r} is missing a value") from None
        assign(key, raw)
    cfg = RunConfig(**values)
    cfg.validate()
    if cfg.mesh_file and not os.path.exists(cfg.mesh_file):
        raise ConfigError(f"mesh file {cfg.mesh_file!r} does not exist")
    return cfg


def _fmt(x):
    return format(float(x), ".17g")


def emit_snapshot(mesh, C, degree, step_index, outdir, gamma):
    """Write solution/modes CSVs (+ VTK in 2D) for one step."""
    os.makedirs(outdir, exist_ok=True)
    two_d = hasattr(mesh, "cells")
    if two_d:
        ubar = solver2d.cell_averages_2d(C, degree)
        bary = mesh.barycenters()
        v = mesh.verts[mesh.cells]
        x_left = v[..., 0].min(axis=1)
        x_right = v[..., 0].max(axis=1)
        x_bary = bary[:, 0]
        vel = ubar[:, 1:3] / ubar[:, 0:1]
        p = (gamma - 1.0) * (ubar[:, 3] - 0.5 * (ubar[:, 1] ** 2 + ubar[:, 2] ** 2) / ubar[:, 0])
        header = "cell_id,x_left,x_right,x_bary,rho,vx,vy,p"
        rows = [
            f"{i},{_fmt(x_left[i])},{_fmt(x_right[i])},{_fmt(x_bary[i])},"
            f"{_fmt(ubar[i, 0])},{_fmt(vel[i, 0])},{_fmt(vel[i, 1])},{_fmt(p[i])}"
            for i in range(mesh.n_cells)]
    else:
        ubar = solver1d.cell_averages(C, degree)
        x = mesh.x
        vel = ubar[:, 1] / ubar[:, 0]
        p = (gamma - 1.0) * (ubar[:, 2] - 0.5 * ubar[:, 1] ** 2 / ubar[:, 0])
        header = "cell_id,x_left,x_right,x_bary,rho,vx,p"
        rows = [
            f"{i},{_fmt(x[i])},{_fmt(x[i + 1])},{_fmt(0.5 * (x[i] + x[i + 1]))},"
            f"{_fmt(ubar[i, 0])},{_fmt(vel[i])},{_fmt(p[i])}"
            for i in range(len(ubar))]
    with open(os.path.join(outdir, f"solution_{step_index:06d}.csv"), "w") as fh:
        fh.write(header + "\n" + "\n".join(rows) + "\n")

    nv = C.shape[2]
    var_names = ["rho", "momx", "momy", "energy"] if nv == 4 else ["rho", "momx", "energy"]
    with open(os.path.join(outdir, f"modes_{step_index:06d}.csv"), "w") as fh:
        fh.write("cell_id,mode," + ",".join(var_names) + "\n")
        for i in range(C.shape[0]):
            for mmode in range(C.shape[1]):
                fh.write(f"{i},{mmode}," + ",".join(_fmt(c) for c in C[i, mmode]) + "\n")
    if two_d:
        write_vtk(mesh, C, degree, os.path.join(outdir, f"mesh_{step_index:06d}.vtk"), gamma)


def write_vtk(mesh, C, degree, path, gamma):
    """Legacy ASCII unstructured-grid file with rho, p and quality cell data."""
    ubar = solver2d.cell_averages_2d(C, degree)
    p = (gamma - 1.0) * (ubar[:, 3] - 0.5 * (ubar[:, 1] ** 2 + ubar[:, 2] ** 2) / ubar[:, 0])
    q = mesh.cell_quality()
    nc = mesh.n_cells
    lines = ["# vtk DataFile Version 3.0", "aledg snapshot", "ASCII",
             "DATASET UNSTRUCTURED_GRID", f"POINTS {mesh.n_verts} double"]
    lines += [f"{_fmt(x)} {_fmt(y)} 0.0" for x, y in mesh.verts]
    lines.append(f"CELLS {nc} {4 * nc}")
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.cells]
    lines.append(f"CELL_TYPES {nc}")
    lines += ["5"] * nc
    lines.append(f"CELL_DATA {nc}")
    for name, arr in (("rho", ubar[:, 0]), ("p", p), ("quality", q)):
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines += [_fmt(v) for v in arr]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def run_command(cfg: RunConfig):
    outdir = cfg.output_dir or os.path.join(
        os.environ.get("ALEDG_OUTPUT_DIR", "runs"), cfg.case)
    os.makedirs(outdir, exist_ok=True)
    case = cases.get_case(cfg.case, boost=cfg.boost)
    report_path = os.path.join(outdir, "report.csv")
    rep_fh = open(report_path, "w")
    nv = 4 if case.dim == 2 else 3
    mom_cols = "total_momx,total_momy" if nv == 4 else "total_momx"
    rep_fh.write(f"step,t,dt,limited,swaps,predictor_fallbacks,min_quality,"
                 f"max_quality,total_rho,{mom_cols},total_energy,seed\n")

    def cb(step, t, mesh, C, rep):
        tot = ",".join(_fmt(v) for v in rep.totals)
        rep_fh.write(f"{step},{_fmt(t)},{_fmt(rep.dt)},{rep.limited},{rep.swaps},"
                     f"{rep.predictor_fallbacks},{_fmt(rep.min_quality)},"
                     f"{_fmt(rep.max_quality)},{tot},{cfg.seed}\n")
        if cfg.snapshot_interval and step % cfg.snapshot_interval == 0:
            emit_snapshot(mesh, C, cfg.degree, step, outdir, case.gamma)

    result = scheme.run(case, cfg, callback=cb)
    emit_snapshot(result.mesh, result.coeffs, result.degree, result.steps,
                  outdir, case.gamma)
    rep_fh.close()
    if case.reference != "none":
        if case.dim == 1:
            err = cases.error_norm_1d(result.mesh.x, result.coeffs, result.degree,
                                      case, result.t, "L2", "rho")
        else:
            err = solver2d.error_norm_2d(result.mesh, result.coeffs, result.degree,
                                         case, result.t, "L2", "rho")
        print(f"case={cfg.case} steps={result.steps} t={result.t:.6g} "
              f"L2(rho)={err:.6e}")
    else:
        print(f"case={cfg.case} steps={result.steps} t={result.t:.6g}")
    print(f"outputs in {outdir}")
    return 0


def convergence_study(cfg: RunConfig, resolutions, outdir=None):
    """Run a resolution sweep; returns rows (n, error, rate) and writes CSV."""
    case = cases.get_case(cfg.case, boost=cfg.boost)
    if case.reference == "none":
        raise ConfigError(f"case {cfg.case!r} has no reference solution")
    rows = []
    for n in resolutions:
        import copy
        c = copy.deepcopy(cfg)
        c.n = int(n)
        result = scheme.run(case, c)
        if case.dim == 1:
            err = cases.error_norm_1d(result.mesh.x, result.coeffs, result.degree,
                                      case, result.t, "L2", "rho")
        else:
            err = solver2d.error_norm_2d(result.mesh, result.coeffs, result.degree,
                                         case, result.t, "L2", "rho")
        rate = ""
        if rows and rows[-1][1] > 0 and err > 0:
            rate = np.log2(rows[-1][1] / err) / np.log2(n / rows[-1][0])
        rows.append((int(n), err, rate))
    outdir = outdir or cfg.output_dir or os.path.join(
        os.environ.get("ALEDG_OUTPUT_DIR", "runs"), f"{cfg.case}_convergence")
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "convergence.csv")
    with open(path, "w") as fh:
        fh.write("n,error,rate\n")
        for n, e, r in rows:
            fh.write(f"{n},{_fmt(e)},{'' if r == '' else _fmt(r)}\n")
    for n, e, r in rows:
        print(f"N={n:6d}  error={e:.6e}  rate={'' if r == '' else f'{r:.3f}'}")
    print(f"table written to {path}")
    return rows


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__)
        return 0
    cmd, rest = argv[0], argv[1:]
    try:
        if cmd == "cases":
            for name in cases.case_names():
                spec = cases.get_case(name)
                print(f"{name:18s} {spec.dim}D  T={spec.final_time}  gamma={spec.gamma:.4g}")
            return 0
        cfg_path = None
        if "--config" in rest:
            i = rest.index("--config")
            cfg_path = rest[i + 1]
            rest = rest[:i] + rest[i + 2:]
        resolutions = None
        if "--resolutions" in rest:
            i = rest.index("--resolutions")
            resolutions = [int(s) for s in rest[i + 1].split(",")]
            rest = rest[:i] + rest[i + 2:]
        cfg = parse_config(cfg_path, rest)
        if cmd == "run":
            return run_command(cfg)
        if cmd == "converge":
            if not resolutions:
                raise ConfigError("converge needs --resolutions N1,N2,...")
            convergence_study(cfg, resolutions)
            return 0
        raise ConfigError(f"unknown command {cmd!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except AledgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
