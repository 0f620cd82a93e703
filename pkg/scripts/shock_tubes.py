#!/usr/bin/env python3
"""Run the 1D shock-tube benchmarks on static and moving meshes.

Each run writes snapshots and a report under runs/<case>_<mode>/ so the
plot scripts can render the density profiles against the exact solutions.
"""

import argparse

from aledg import cli

CASES = {
    "sod": ["--flux", "roe", "--roe_alpha", "0.0", "--n", "100"],
    "lax": ["--flux", "hllc", "--n", "100"],
    "shu_osher": ["--flux", "roe", "--n", "200"],
    "problem123": ["--flux", "hllc", "--n", "100", "--h_max", "0.05"],
    "blast": ["--flux", "hllc", "--n", "400", "--h_min", "0.001"],
    "leblanc": ["--flux", "rusanov", "--n", "400", "--h_min", "0.002",
                "--h_max", "0.05"],
    "single_contact": ["--flux", "roe", "--roe_alpha", "0.0", "--n", "100"],
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("cases", nargs="*", default=list(CASES))
    args = ap.parse_args()
    for name in (args.cases or CASES):
        for mode in ("static", "moving"):
            flags = ["--case", name, "--mesh_mode", mode,
                     "--output_dir", f"runs/{name}_{mode}"] + CASES[name]
            if mode == "static":
                # adaptation bounds only apply to the moving runs
                flags = [f for i, f in enumerate(flags)
                         if not (f in ("--h_min", "--h_max")
                                 or (i > 0 and flags[i - 1] in ("--h_min", "--h_max")))]
            print(f"== {name} {mode}")
            rc = cli.main(["run"] + flags)
            if rc:
                raise SystemExit(rc)


if __name__ == "__main__":
    main()
