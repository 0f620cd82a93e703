#!/usr/bin/env python3
"""Smooth-advection convergence tables (static/moving, Rusanov/HLLC, k=1..3).

Writes one CSV per configuration under runs/convergence_1d/ and prints the
error/rate table for each.  Degrees above one run at a reduced CFL: the
single-step scheme with the cell-local predictor is linearly unstable at
cfl=0.9 for k >= 2 (see tests/test_scheme.py for the measured thresholds).
"""

import argparse
import copy

from aledg import cli
from aledg.config import RunConfig

CFL = {1: 0.9, 2: 0.8, 3: 0.7}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--resolutions", default="50,100,200,400")
    ap.add_argument("--degrees", default="1,2,3")
    args = ap.parse_args()
    res = [int(s) for s in args.resolutions.split(",")]
    for flux in ("rusanov", "hllc"):
        for mode in ("static", "moving"):
            for k in (int(s) for s in args.degrees.split(",")):
                cfg = RunConfig(case="smooth_advection", degree=k, flux=flux,
                                cfl=CFL[k], mesh_mode=mode, limiter="none",
                                positivity=False,
                                output_dir=f"runs/convergence_1d/{flux}_{mode}_k{k}")
                print(f"== {flux} {mode} k={k}")
                cli.convergence_study(copy.deepcopy(cfg), res)


if __name__ == "__main__":
    main()
