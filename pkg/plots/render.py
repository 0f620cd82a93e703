#!/usr/bin/env python3
"""Render figures from solver run directories.

Reads only the documented output formats (solution_*.csv, report.csv,
convergence.csv, mesh_*.vtk legacy ASCII) and never writes into the run
directory.  Figure kinds:

  profile          cell-average profile of one variable vs x (1D runs)
  convergence      log-log error vs resolution from convergence.csv
  mesh2d           triangle mesh colored by a cell variable (2D runs)
  quality_history  min/max cell quality and swaps over time from report.csv

Usage: render.py --dir RUNDIR --kind profile --var rho --out fig.png
"""

import argparse
import csv
import glob
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def latest(rundir, pattern):
    hits = sorted(glob.glob(os.path.join(rundir, pattern)))
    if not hits:
        raise FileNotFoundError(f"no {pattern} in {rundir}")
    return hits[-1]


def read_solution_csv(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    cols = {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}
    return cols


def read_vtk(path):
    """Minimal legacy ASCII unstructured-grid reader (points, tris, cell data)."""
    with open(path) as fh:
        tokens = fh.read().split()
    i = 0

    def seek(word):
        nonlocal i
        while tokens[i] != word:
            i += 1

    seek("POINTS")
    npts = int(tokens[i + 1])
    i += 3
    pts = np.array(tokens[i:i + 3 * npts], dtype=float).reshape(-1, 3)[:, :2]
    i += 3 * npts
    seek("CELLS")
    ncells = int(tokens[i + 1])
    i += 3
    cells = np.array(tokens[i:i + 4 * ncells], dtype=int).reshape(-1, 4)[:, 1:]
    i += 4 * ncells
    data = {}
    while True:
        try:
            seek("SCALARS")
        except IndexError:
            break
        name = tokens[i + 1]
        i += 3
        seek("LOOKUP_TABLE")
        i += 2
        data[name] = np.array(tokens[i:i + ncells], dtype=float)
        i += ncells
    return pts, cells, data


def render_profile(rundir, var, out):
    sol = read_solution_csv(latest(rundir, "solution_*.csv"))
    if var not in sol:
        raise KeyError(f"variable {var!r} not in solution file")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(sol["x_bary"], sol[var], "o", ms=2.5, label="numerical")
    ax.set_xlabel("x")
    ax.set_ylabel(var)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out, dpi=130)


def render_convergence(rundir, out):
    path = os.path.join(rundir, "convergence.csv")
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    n = np.array([float(r["n"]) for r in rows])
    err = np.array([float(r["error"]) for r in rows])
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    ax.loglog(n, err, "o-", label="error")
    for p in (1, 2, 3, 4):
        ref = err[0] * (n / n[0]) ** (-p)
        ax.loglog(n, ref, "--", lw=0.8, label=f"slope -{p}")
    ax.set_xlabel("N")
    ax.set_ylabel("L2 error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=130)


def render_mesh2d(rundir, var, out):
    pts, cells, data = read_vtk(latest(rundir, "mesh_*.vtk"))
    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    arr = data.get(var)
    if arr is None:
        raise KeyError(f"variable {var!r} not in VTK cell data; have {sorted(data)}")
    tp = ax.tripcolor(pts[:, 0], pts[:, 1], cells, facecolors=arr,
                      edgecolors="k", linewidth=0.15, cmap="viridis")
    fig.colorbar(tp, ax=ax, label=var)
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(out, dpi=130)


def render_quality_history(rundir, out):
    with open(os.path.join(rundir, "report.csv")) as fh:
        rows = list(csv.DictReader(fh))
    t = np.array([float(r["t"]) for r in rows])
    qmin = np.array([float(r["min_quality"]) for r in rows])
    qmax = np.array([float(r["max_quality"]) for r in rows])
    swaps = np.array([float(r["swaps"]) for r in rows])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5.5), sharex=True)
    ax1.plot(t, qmax, label="max Q")
    ax1.plot(t, qmin, label="min Q")
    ax1.set_ylabel("cell quality")
    ax1.legend()
    ax2.step(t, np.cumsum(swaps), where="post")
    ax2.set_ylabel("cumulative swaps")
    ax2.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(out, dpi=130)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dir", required=True, help="run directory")
    ap.add_argument("--kind", required=True,
                    choices=["profile", "convergence", "mesh2d", "quality_history"])
    ap.add_argument("--var", default="rho")
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)
    try:
        if args.kind == "profile":
            render_profile(args.dir, args.var, args.out)
        elif args.kind == "convergence":
            render_convergence(args.dir, args.out)
        elif args.kind == "mesh2d":
            render_mesh2d(args.dir, args.var, args.out)
        else:
            render_quality_history(args.dir, args.out)
    except (OSError, KeyError, FileNotFoundError) as exc:
        print(f"render failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
