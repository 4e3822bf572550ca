#!/usr/bin/env python3
"""Run the full pipeline over every registered model and print a summary.

For each conformally compact family: boundary-limit residual, renormalized
volume (Einstein fills only), eigenfunction data, the Gauss-Bonnet volume
identity and the decision criteria. For each closed model: the integral
invariants against their known values. Mostly a smoke harness; the per-model
numbers land in one table so regressions stand out at a glance.

Usage:
    python3 scripts/analyze_models.py [--skip-slow] [--out DIR]
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from ccegeom import models
from ccegeom.eigenfunction import compactification_checks, solve_eigenfunction
from ccegeom.integrals import (
    combined_formulas,
    doubled_suite,
    fg_radial_domain,
    gauss_bonnet_volume_residual,
    integrate_curvature,
)
from ccegeom.topology import build_topology_report, render_topology_report
from ccegeom.volume import fit_renormalized_volume


def analyze_closed(name, rows):
    mdl = models.build(name)
    t0 = time.perf_counter()
    suite = integrate_curvature(mdl.field, mdl.domain, mdl.orientation)
    plus, minus = combined_formulas(suite, mdl.euler, mdl.signature)
    rows.append({
        "model": name,
        "kind": "closed",
        "euler_err": abs(suite.euler_gb - mdl.euler),
        "signature_err": abs(suite.signature - mdl.signature),
        "combined_residual": max(abs(plus), abs(minus)),
        "volume_err": abs(suite.volume - mdl.volume),
        "seconds": time.perf_counter() - t0,
    })


def analyze_cce(name, rows, verbose):
    fg = models.build(name)
    t0 = time.perf_counter()
    row = {"model": name, "kind": "conformally-compact",
           "boundary_limit": fg.boundary_limit_residual()}

    sol = solve_eigenfunction(fg)
    checks = compactification_checks(sol)
    row["u_min"] = checks.u_min
    row["bochner_sup"] = checks.bochner_sup
    row["scalar_gap"] = checks.scalar_gap

    if fg.einstein:
        fit = fit_renormalized_volume(fg)
        collar = integrate_curvature(fg.four_metric(s_floor=0.005),
                                     fg_radial_domain(fg, s_lo=0.01))
        chi = models.exact_reference(name, "euler")
        residual = gauss_bonnet_volume_residual(chi, collar.weyl_energy, fit.V)
        row["V"] = fit.V
        row["gb_volume_relative"] = abs(residual) / (8 * np.pi ** 2 * chi)
        if verbose:
            report = build_topology_report(
                chi, fit.V, fg.yamabe_positive,
                double_suite=doubled_suite(collar),
                identity_residual=row["gb_volume_relative"])
            print(render_topology_report(report))
    else:
        row["note"] = "not Einstein: volume identity skipped"
    row["seconds"] = time.perf_counter() - t0
    rows.append(row)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--skip-slow", action="store_true",
                        help="skip the AdS family (the slowest solve)")
    parser.add_argument("--out", default=None,
                        help="directory for a JSON copy of the table")
    parser.add_argument("--verbose", action="store_true",
                        help="print per-model topology reports")
    args = parser.parse_args(argv)

    names = models.model_names()
    rows = []
    for name in names["closed"]:
        print(f"closed model {name} ...", flush=True)
        analyze_closed(name, rows)
    for name in names["conformally_compact"]:
        if args.skip_slow and name == "ads_schwarzschild":
            continue
        print(f"conformally compact model {name} ...", flush=True)
        analyze_cce(name, rows, args.verbose)

    width = max(len(r["model"]) for r in rows)
    print()
    for row in rows:
        bits = [f"{row['model']:<{width}}"]
        for key, val in row.items():
            if key in ("model", "kind"):
                continue
            bits.append(f"{key}={val:.3e}" if isinstance(val, float)
                        else f"{key}={val}")
        print("  ".join(bits))

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "model_summary.json")
        with open(path, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"\nwrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
