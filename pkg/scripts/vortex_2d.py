#!/usr/bin/env python3
"""Isentropic vortex on static and moving meshes with mesh maintenance.

Short demonstration run; use --final_time 25 (or more) to watch the
smoothing + edge-swap machinery keep the mesh healthy while the vortex
shears it.
"""

import argparse

from aledg import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", default="24")
    ap.add_argument("--final_time", default="2.0")
    args = ap.parse_args()
    for mode in ("static", "moving"):
        print(f"== vortex {mode}")
        rc = cli.main([
            "run", "--case", "vortex", "--n", args.n, "--mesh_mode", mode,
            "--flux", "hllc", "--tvb_m", "1e12",
            "--final_time", args.final_time, "--snapshot_interval", "50",
            "--output_dir", f"runs/vortex_{mode}"])
        if rc:
            raise SystemExit(rc)


if __name__ == "__main__":
    main()
