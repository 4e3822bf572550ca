#!/usr/bin/env python3
"""Convergence behavior of the volume fit and the eigenfunction solve.

Three sweeps on the hyperbolic model, where every quantity has a closed
form to compare against:

  1. volume fit error against the ladder starting rung s0,
  2. volume fit error against ladder depth at fixed s0,
  3. eigenfunction sup error against the collocation tolerance.

The point of 1 and 2 is that the answer must NOT depend on the ladder
once it spans a decade: the expansion coefficients are properties of the
metric, and the tail columns absorb whatever the truncation leaves over.

Usage:
    python3 scripts/convergence_study.py [--csv PATH]
"""

import argparse
import sys
import time

import numpy as np

from ccegeom import models
from ccegeom.eigenfunction import solve_eigenfunction
from ccegeom.volume import fit_renormalized_volume

V_EXACT = 4 * np.pi ** 2 / 3


def ladder_start_sweep(fg, rows):
    for s0 in (0.5, 0.4, 0.3, 0.2, 0.1, 0.05):
        ladder = s0 * 0.7 ** np.arange(12)
        t0 = time.perf_counter()
        fit = fit_renormalized_volume(fg, ladder=ladder)
        rows.append(("ladder-start", s0, abs(fit.V - V_EXACT),
                     fit.condition_number, time.perf_counter() - t0))


def ladder_depth_sweep(fg, rows):
    for rungs in (8, 10, 12, 14):
        ladder = 0.3 * 0.7 ** np.arange(rungs)
        t0 = time.perf_counter()
        fit = fit_renormalized_volume(fg, ladder=ladder)
        rows.append(("ladder-depth", rungs, abs(fit.V - V_EXACT),
                     fit.condition_number, time.perf_counter() - t0))


def eigen_tolerance_sweep(fg, rows):
    for tol in (1e-6, 1e-8, 1e-10, 1e-11):
        t0 = time.perf_counter()
        sol = solve_eigenfunction(fg, tol=tol)
        s = np.geomspace(sol.s_lo, sol.s_hi, 400)
        sup = float(np.max(np.abs(sol.u(s) - (1 / s + s / 4))))
        rows.append(("eigen-tol", tol, sup, sol.mesh_size,
                     time.perf_counter() - t0))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--csv", default=None, help="also write rows here")
    args = parser.parse_args(argv)

    fg = models.hyperbolic()
    rows = []
    ladder_start_sweep(fg, rows)
    ladder_depth_sweep(fg, rows)
    eigen_tolerance_sweep(fg, rows)

    print(f"{'sweep':<14} {'parameter':>12} {'error':>12} "
          f"{'cond/mesh':>12} {'seconds':>8}")
    for sweep, param, err, aux, secs in rows:
        print(f"{sweep:<14} {param:>12g} {err:>12.3e} {aux:>12.4g} {secs:>8.2f}")

    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("sweep,parameter,error,aux,seconds\n")
            for sweep, param, err, aux, secs in rows:
                fh.write(f"{sweep},{param:.6g},{err:.6e},{aux:.6g},{secs:.3f}\n")
        print(f"\nwrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
