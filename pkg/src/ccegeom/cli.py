"""Batch front end: run the full pipeline from a config and emit artifacts.

Subcommands
-----------
analyze    model -> curvature -> volume fit -> compactification ->
           integrals -> topology report; writes report.txt, report.json
           and CSV tables into the output directory.
check      invariant suites only (curvature symmetries, Bochner identity,
           conformal invariance, index-formula combinations, negative
           controls); intended for CI. No artifacts, exit status is the
           result.
volume     the renormalized-volume fit alone.
curvature  pointwise curvature packet dump at deterministic sample points.

Configuration comes from an optional JSON document (sections "model",
"numerics", "outputs") with flat command-line flags overriding document
fields, so a run of record is a single file. All outputs are
deterministic: fixed-order reductions, fixed sample points, fixed seeds.

Exit codes: 0 all gates pass, 1 a gate or module computation failed,
2 the configuration or command line is unusable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import models, volume
from .errors import CcegeomError, NotAvailable
from .eigenfunction import (
    asymptotic_data,
    compactification_checks,
    compactified_metric_field,
    compactified_radial_domain,
    solve_eigenfunction,
)
from .integrals import (
    combined_formulas,
    doubled_suite,
    fg_radial_domain,
    gauss_bonnet_volume_residual,
    integrate_curvature,
    sigma2_volume_bridge,
    suite_document,
)
from .normal_form import FGMetric, fg_document
from .tensor import ScalarField, curvature, einstein_residual, riemann_symmetry_residuals
from .topology import build_topology_report, render_topology_report, topology_document

__all__ = ["RunConfig", "run_analyze", "run_check", "run_volume",
           "run_curvature", "build_parser", "main"]

#: artifact kinds the analyze pipeline can emit
ARTIFACT_KINDS = ("report", "csv-tables", "raw-grids")

_SEED = 20260816


class ConfigError(Exception):
    """Unusable configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    """Resolved run configuration: document defaults plus flag overrides."""

    model: str = "hyperbolic"
    parameters: dict = field(default_factory=dict)
    ladder: tuple = None
    tol_quadrature: float = 1e-12
    tol_fit: float = 1e-3
    tol_identity: float = 1e-3
    outputs: tuple = ARTIFACT_KINDS
    output_dir: str = "."

    def validate(self) -> "RunConfig":
        for label, value in (("tol_quadrature", self.tol_quadrature),
                             ("tol_fit", self.tol_fit),
                             ("tol_identity", self.tol_identity)):
            if not (float(value) > 0):
                raise ConfigError(f"{label} must be positive, got {value}")
        if self.ladder is not None:
            rungs = tuple(float(r) for r in self.ladder)
            if len(rungs) < 2 or any(b >= a for a, b in zip(rungs, rungs[1:])):
                raise ConfigError(
                    f"ladder must be strictly decreasing with at least two rungs, got {rungs}")
            if rungs[-1] <= 0:
                raise ConfigError("ladder rungs must be positive")
            self.ladder = rungs
        unknown = set(self.outputs) - set(ARTIFACT_KINDS)
        if unknown:
            raise ConfigError(
                f"unknown output kinds {sorted(unknown)}; known: {ARTIFACT_KINDS}")
        return self


def _parse_ladder(text: str) -> tuple:
    try:
        rungs = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse ladder {text!r}: {exc}") from None
    if not rungs:
        raise ConfigError("empty ladder")
    # user ladders may be short; continue geometrically so the regression
    # keeps enough rows to separate the expansion columns
    try:
        extended = volume.extend_ladder(rungs, target=8, ratio=0.7)
    except CcegeomError as exc:
        raise ConfigError(str(exc)) from None
    return tuple(float(r) for r in extended)


def resolve_config(args) -> RunConfig:
    """Merge defaults, the JSON document and command-line flags."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
        model = doc.get("model", {})
        if model:
            cfg.model = str(model.get("name", cfg.model))
            cfg.parameters = {k: v for k, v in model.items() if k != "name"}
        numerics = doc.get("numerics", {})
        if "ladder" in numerics:
            cfg.ladder = tuple(float(r) for r in numerics["ladder"])
        cfg.tol_quadrature = float(numerics.get("tol_quadrature", cfg.tol_quadrature))
        cfg.tol_fit = float(numerics.get("tol_fit", cfg.tol_fit))
        cfg.tol_identity = float(numerics.get("tol_identity", cfg.tol_identity))
        outputs = doc.get("outputs", {})
        cfg.output_dir = str(outputs.get("dir", cfg.output_dir))
        if "artifacts" in outputs:
            cfg.outputs = tuple(outputs["artifacts"])
    if getattr(args, "model", None):
        if args.model != cfg.model:
            cfg.parameters = {}
        cfg.model = args.model
    if getattr(args, "m", None) is not None:
        cfg.parameters["m"] = float(args.m)
    if getattr(args, "ladder", None):
        cfg.ladder = _parse_ladder(args.ladder)
    if getattr(args, "tol_quadrature", None) is not None:
        cfg.tol_quadrature = float(args.tol_quadrature)
    if getattr(args, "tol_fit", None) is not None:
        cfg.tol_fit = float(args.tol_fit)
    if getattr(args, "out", None):
        cfg.output_dir = args.out
    return cfg.validate()


def _build_model(cfg: RunConfig):
    try:
        return models.build(cfg.model, **cfg.parameters)
    except (CcegeomError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# report plumbing

def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"not serializable: {type(obj)!r}")


def _render_section(lines, key, value, depth=1):
    pad = "  " * depth
    if isinstance(value, dict):
        lines.append(f"{pad}{key}:")
        for k, v in value.items():
            _render_section(lines, k, v, depth + 1)
    elif isinstance(value, (list, tuple)):
        lines.append(f"{pad}{key} = {', '.join(str(v) for v in value)}")
    else:
        lines.append(f"{pad}{key} = {value}")


def _render_report(doc: dict, gates: list, topo_text: str = "") -> str:
    lines = ["ccegeom analyze report", "  schema: analyze-report v1"]
    for key, value in doc.items():
        if key in ("schema", "topology"):
            continue
        _render_section(lines, key, value)
    lines.append("  gates:")
    for name, ok, detail in gates:
        tag = "pass" if ok else "FAIL"
        lines.append(f"    [{tag:>4}] {name}: {detail}")
    if topo_text:
        lines.extend("  " + ln for ln in topo_text.splitlines())
    return "\n".join(lines) + "\n"


def _write_artifacts(cfg: RunConfig, doc: dict, gates: list, topo_text: str,
                     tables: dict, grids: dict):
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = lambda name: os.path.join(cfg.output_dir, name)
    written = []
    if "report" in cfg.outputs:
        with open(path("report.txt"), "w") as fh:
            fh.write(_render_report(doc, gates, topo_text))
        machine = dict(doc)
        machine["gates"] = [
            {"name": n, "ok": bool(ok), "detail": d} for n, ok, d in gates]
        with open(path("report.json"), "w") as fh:
            json.dump(machine, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
        written += ["report.txt", "report.json"]
    if "csv-tables" in cfg.outputs:
        for name, writer in tables.items():
            writer(path(name))
            written.append(name)
    if "raw-grids" in cfg.outputs:
        for name, writer in grids.items():
            writer(path(name))
            written.append(name)
    return written


def _write_suite_csv(suites: dict):
    def writer(path):
        with open(path, "w") as fh:
            fh.write("# integral-suite v1\n")
            fh.write("domain,quantity,value,error_estimate\n")
            for label in sorted(suites):
                doc = suite_document(suites[label])
                errors = doc.pop("error_estimates")
                doc.pop("domain")
                for key in sorted(doc):
                    if key == "orientation":
                        continue
                    err = errors.get(key, "")
                    fh.write(f"{label},{key},{doc[key]:.17g},"
                             + (f"{err:.3e}" if err != "" else "") + "\n")
    return writer


def _write_eigen_grid(sol):
    s = np.geomspace(sol.s_lo, sol.s_hi * 0.999, 96)

    def writer(path):
        with open(path, "w") as fh:
            fh.write("# eigen-grid v1\n")
            fh.write("s,u,du,compactified_scalar\n")
            for sk in s:
                fh.write(f"{sk:.17g},{sol.u(sk):.17g},{sol.du(sk):.17g},"
                         f"{sol.compactified_scalar(sk):.17g}\n")
    return writer


class _StageFailure(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"stage '{stage}': {type(exc).__name__}: {exc}")
        self.stage = stage
        self.exc = exc


def _stage(label: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except CcegeomError as exc:
        raise _StageFailure(label, exc) from exc


# ---------------------------------------------------------------------------
# analyze

def _analyze_closed(cfg: RunConfig, model) -> int:
    suite = _stage("curvature integrals", integrate_curvature,
                   model.field, model.domain, model.orientation)
    plus, minus = combined_formulas(suite, model.euler, model.signature)
    doc = {
        "model": {
            "name": model.name, "kind": "closed",
            "euler": model.euler, "signature": model.signature,
            "einstein": model.einstein,
        },
        "integrals": suite_document(suite),
        "identities": {
            "euler_gb_deviation": suite.euler_gb - model.euler,
            "signature_deviation": suite.signature - model.signature,
            "combined_selfdual_residual": plus,
            "combined_antiselfdual_residual": minus,
        },
    }
    gates = [
        ("euler-characteristic", abs(suite.euler_gb - model.euler) < 1e-4,
         f"euler_gb = {suite.euler_gb:.10g} vs {model.euler}"),
        ("signature", abs(suite.signature - model.signature) < 1e-4,
         f"signature = {suite.signature:.10g} vs {model.signature}"),
        ("combined-formulas", max(abs(plus), abs(minus)) < 1e-3,
         f"residuals {plus:.3e}, {minus:.3e}"),
        ("volume", abs(suite.volume - model.volume) < 1e-6 * max(1.0, model.volume),
         f"quadrature {suite.volume:.10g} vs closed form {model.volume:.10g}"),
    ]
    tables = {"integrals.csv": _write_suite_csv({suite.domain_label: suite})}
    written = _write_artifacts(cfg, doc, gates, "", tables, {})
    _print_gates(gates, written)
    return 0 if all(ok for _, ok, _ in gates) else 1


def _analyze_cce(cfg: RunConfig, fg: FGMetric) -> int:
    limit_res = _stage("boundary limit", fg.boundary_limit_residual)
    # the volume expansion in Einstein powers (no eps^-2, no log) only
    # exists for Einstein fills; fitting it to anything else is noise
    fit = None
    if fg.einstein:
        fit = _stage("volume fit", volume.fit_renormalized_volume, fg,
                     ladder=cfg.ladder, quad_tol=cfg.tol_quadrature,
                     stability_gate=cfg.tol_fit)
    sol = _stage("eigenfunction", solve_eigenfunction, fg)
    checks = _stage("compactification checks", compactification_checks, sol)

    # Weyl energy of the collar; the integrand density |W|^2 dv is a
    # pointwise conformal invariant, so this is also the Weyl energy of
    # the compactified metric. The small-s cut costs O(s^3).
    collar = _stage("collar integrals", integrate_curvature,
                    fg.four_metric(s_floor=0.005),
                    fg_radial_domain(fg, s_lo=0.01))
    compact = _stage("compactified integrals", integrate_curvature,
                     compactified_metric_field(sol, s_floor=1e-4),
                     compactified_radial_domain(sol, s_lo=0.0))

    try:
        chi = models.exact_reference(cfg.model, "euler", **cfg.parameters)
    except NotAvailable:
        chi = None

    res_max = float(np.max(einstein_residual(
        fg.four_metric(s_floor=0.005),
        _radial_points(fg, np.geomspace(0.05, 0.9 * fg.s_max, 12)))))

    if fit is not None:
        volume_doc = {
            "V": fit.V, "c0": fit.c0, "c2": fit.c2,
            "fit_residual": fit.residual,
            "condition_number": fit.condition_number,
            "stability_change": fit.stability_change,
            "ladder": [float(e) for e in fit.epsilons],
        }
    else:
        volume_doc = {"note": "skipped: the expansion in Einstein powers "
                              "does not apply to a non-Einstein family"}

    doc = {
        "model": {"kind": "conformally-compact", **fg_document(fg)},
        "volume_fit": volume_doc,
        "eigenfunction": {
            "w2": float(sol.w2),
            "w2_exact": sol.w2_exact,
            "u_min": checks.u_min,
            "scalar_boundary": checks.scalar_boundary,
            "scalar_min": checks.scalar_min,
            "scalar_gap": checks.scalar_gap,
            "bochner_sup": checks.bochner_sup,
            "second_form_linear": checks.second_form_linear,
            "collocation_residual": checks.collocation_residual,
            "asymptotic_residual": checks.asymptotic_residual,
        },
        "integrals": {
            "collar": suite_document(collar),
            "compactified": suite_document(compact),
        },
        "identities": {
            "einstein_residual_max": res_max,
            "boundary_limit_residual": limit_res,
        },
    }

    gates = [
        ("boundary-limit", limit_res < 1e-6, f"residual {limit_res:.3e}"),
        ("eigenfunction-positive", checks.positive,
         f"u_min = {checks.u_min:.6g}"),
        ("scalar-lower-bound", checks.scalar_bounded_below,
         f"min scalar - 2 Rhat = {checks.scalar_gap:+.3e}"),
        ("totally-geodesic-boundary", checks.totally_geodesic,
         f"linear coefficient {checks.second_form_linear:.3e}"),
    ]

    topo_text = ""
    if fg.einstein:
        identity = gauss_bonnet_volume_residual(chi, collar.weyl_energy, fit.V)
        rel = abs(identity) / (8 * np.pi**2 * chi)
        bridge = sigma2_volume_bridge(compact.sigma2_integral, fit.V)
        doc["identities"].update({
            "gauss_bonnet_volume_residual": identity,
            "gauss_bonnet_volume_relative": rel,
            "sigma2_volume_bridge": bridge,
        })
        gates += [
            ("einstein-residual", res_max < 1e-6, f"max {res_max:.3e}"),
            ("bochner-identity", checks.bochner_identity,
             f"sup residual {checks.bochner_sup:.3e}"),
            ("gauss-bonnet-volume", rel < cfg.tol_identity,
             f"relative residual {rel:.3e}"),
        ]
        topo = _stage("topology report", build_topology_report,
                      chi, fit.V, fg.yamabe_positive,
                      double_suite=doubled_suite(compact),
                      identity_residual=rel, identity_tol=cfg.tol_identity)
        doc["topology"] = topology_document(topo)
        topo_text = render_topology_report(topo)
    else:
        # negative control: the pipeline must notice the metric is not
        # Einstein rather than certify it
        gates += [
            ("non-einstein-detected", res_max > 1e-2,
             f"einstein residual {res_max:.3e} (expected large)"),
            ("bochner-flag-trips", not checks.bochner_identity,
             f"sup residual {checks.bochner_sup:.3e} (expected large)"),
        ]
        doc["identities"]["note"] = (
            "model is not Einstein; volume identity and decision criteria "
            "are not applicable")

    tables = {
        "integrals.csv": _write_suite_csv({
            collar.domain_label: collar, compact.domain_label: compact}),
    }
    if fit is not None:
        tables["volumes.csv"] = lambda path: volume.write_volume_table(fit, path)
    grids = {"eigen_grid.csv": _write_eigen_grid(sol)}
    written = _write_artifacts(cfg, doc, gates, topo_text, tables, grids)
    _print_gates(gates, written)
    if topo_text:
        print(topo_text)
    return 0 if all(ok for _, ok, _ in gates) else 1


def _radial_points(fg: FGMetric, s_values) -> np.ndarray:
    fiber = np.asarray(fg.boundary.default_point, dtype=float)
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    return np.column_stack([s_values,
                            np.broadcast_to(fiber, (s_values.size, fiber.size))])


def _print_gates(gates, written):
    for name, ok, detail in gates:
        tag = "pass" if ok else "FAIL"
        print(f"[{tag:>4}] {name}: {detail}")
    if written:
        print("artifacts: " + ", ".join(written))


def run_analyze(cfg: RunConfig, args=None) -> int:
    model = _build_model(cfg)
    try:
        if isinstance(model, FGMetric):
            return _analyze_cce(cfg, model)
        return _analyze_closed(cfg, model)
    except _StageFailure as exc:
        print(f"analyze failed on model '{cfg.model}' at {exc}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------------------
# check: invariant suites for CI

def _conformal_factors(chart, count: int, seed: int = _SEED):
    import sympy as sp

    rng = np.random.default_rng(seed)
    xs = sp.symbols(" ".join(chart.names), real=True)
    out = []
    for _ in range(count):
        a, b, c = (round(float(v), 6) for v in rng.uniform(-0.25, 0.25, 3))
        k1, k2 = (int(v) for v in rng.integers(1, 3, 2))
        expr = (a * sp.sin(k1 * xs[0]) * sp.cos(xs[1])
                + b * sp.cos(xs[2]) + c * sp.sin(k2 * xs[3]))
        out.append(ScalarField.from_sympy(xs, expr))
    return out


def _closed_sample_points(field_obj, count: int = 4) -> np.ndarray:
    lo = np.asarray(field_obj.chart.lo, dtype=float)
    hi = np.asarray(field_obj.chart.hi, dtype=float)
    fracs = np.array([
        [0.31, 0.47, 0.53, 0.62],
        [0.55, 0.71, 0.36, 0.28],
        [0.44, 0.58, 0.69, 0.81],
        [0.66, 0.33, 0.49, 0.57],
    ])[:count]
    return lo + fracs * (hi - lo)


def run_check(cfg: RunConfig, args=None) -> int:
    inject = bool(getattr(args, "inject_defect", False))
    names = models.model_names()
    scope = names["closed"] + names["conformally_compact"]
    if cfg.model != "all":
        if cfg.model not in scope:
            raise ConfigError(
                f"unknown model '{cfg.model}'; known: all, {', '.join(scope)}")
        scope = [cfg.model]

    results = []

    def record(name, ok, detail):
        results.append((name, bool(ok), detail))
        tag = "  ok" if ok else "FAIL"
        print(f"[{tag}] {name}: {detail}")

    for name in scope:
        model = models.build(name)
        if isinstance(model, FGMetric):
            _check_cce(name, model, record)
        else:
            _check_closed(name, model, record, inject)

    if "product_spheres" in scope:
        _check_conformal_invariance(record)

    bad = [name for name, ok, _ in results if not ok]
    print(f"{len(results) - len(bad)}/{len(results)} checks passed"
          + (f"; failing: {', '.join(bad)}" if bad else ""))
    return 1 if bad else 0


def _check_closed(name, model, record, inject):
    pts = _closed_sample_points(model.field)
    pack = curvature(model.field, pts, model.orientation)
    riem = np.array(pack.riemann, copy=True)
    if inject:
        riem[..., 0, 1, 0, 1] *= -1.0
    res = riemann_symmetry_residuals(riem)
    worst = max(res.values())
    record(f"bianchi-symmetries {name}", worst < 1e-9,
           f"max violation {worst:.3e} "
           f"(first bianchi {res['first_bianchi']:.3e})")

    suite = integrate_curvature(model.field, model.domain, model.orientation)
    record(f"euler-gb {name}", abs(suite.euler_gb - model.euler) < 1e-4,
           f"{suite.euler_gb:.8g} vs {model.euler}")
    record(f"signature {name}", abs(suite.signature - model.signature) < 1e-4,
           f"{suite.signature:.3e} vs {model.signature}")
    plus, minus = combined_formulas(suite, model.euler, model.signature)
    record(f"combined-formulas {name}", max(abs(plus), abs(minus)) < 1e-3,
           f"residuals {plus:.3e}, {minus:.3e}")


def _check_cce(name, fg, record):
    limit = fg.boundary_limit_residual()
    record(f"boundary-limit {name}", limit < 1e-6, f"residual {limit:.3e}")

    pts = _radial_points(fg, np.geomspace(0.05, 0.9 * fg.s_max, 8))
    res = float(np.max(einstein_residual(fg.four_metric(s_floor=0.02), pts)))
    if fg.einstein:
        record(f"einstein-residual {name}", res < 1e-6, f"max {res:.3e}")
    else:
        record(f"non-einstein-detected {name}", res > 1e-2,
               f"max {res:.3e} (expected large)")
        data = asymptotic_data(fg)
        amp = float(fg.parameters.get("amplitude", 0.05))
        record(f"matched-asymptotics {name}",
               data.source == "matched" and abs(data.w2 - (0.25 - amp)) < 1e-6,
               f"w2 = {data.w2:.10g} from {data.source} data "
               f"(expected {0.25 - amp})")

    if name == "hyperbolic":
        sol = solve_eigenfunction(fg)
        grid = np.geomspace(sol.s_lo, sol.s_hi, 400)
        exact = models.exact_reference(name, "eigenfunction")
        sup = float(np.max(np.abs(sol.u(grid) - exact(grid))))
        record("eigenfunction-exactness hyperbolic", sup < 1e-8,
               f"sup |u - (1/s + s/4)| = {sup:.3e}")
        checks = compactification_checks(sol)
        record("bochner-identity hyperbolic",
               checks.bochner_identity and checks.bochner_sup < 1e-6,
               f"sup residual {checks.bochner_sup:.3e}")
        record("compactified-scalar hyperbolic",
               abs(checks.scalar_boundary - 12.0) < 1e-5
               and abs(checks.scalar_min - 12.0) < 1e-5,
               f"boundary {checks.scalar_boundary:.10g}, "
               f"min {checks.scalar_min:.10g}")


def _check_conformal_invariance(record, count: int = 2):
    model = models.build("product_spheres")
    base = integrate_curvature(model.field, model.domain, model.orientation)
    from .tensor import conformal_rescale

    worst = 0.0
    for w in _conformal_factors(model.field.chart, count):
        rescaled = conformal_rescale(model.field, w)
        suite = integrate_curvature(rescaled, model.domain, model.orientation)
        dev = abs(suite.weyl_energy - base.weyl_energy) / base.weyl_energy
        worst = max(worst, dev)
    record("conformal-invariance product_spheres", worst < 1e-6,
           f"max relative deviation {worst:.3e} over {count} factors")


# ---------------------------------------------------------------------------
# volume and curvature subcommands

def run_volume(cfg: RunConfig, args=None) -> int:
    fg = _build_model(cfg)
    if not isinstance(fg, FGMetric):
        raise ConfigError(
            f"'{cfg.model}' is a closed model; the volume fit needs a "
            "conformally compact one")
    try:
        fit = _stage("volume fit", volume.fit_renormalized_volume, fg,
                     ladder=cfg.ladder, quad_tol=cfg.tol_quadrature,
                     stability_gate=cfg.tol_fit)
    except _StageFailure as exc:
        print(f"volume fit failed on model '{cfg.model}': {exc}", file=sys.stderr)
        return 1
    print(f"model = {fg.name}")
    print(f"V = {fit.V:.17g}")
    print(f"c0 = {fit.c0:.17g}")
    print(f"c2 = {fit.c2:.17g}")
    print(f"fit_residual = {fit.residual:.3e}")
    print(f"condition_number = {fit.condition_number:.3e}")
    if fit.stability_change is not None:
        print(f"stability_change = {fit.stability_change:.3e}")
    if getattr(args, "out", None) or "csv-tables" in cfg.outputs:
        os.makedirs(cfg.output_dir, exist_ok=True)
        path = os.path.join(cfg.output_dir, "volumes.csv")
        volume.write_volume_table(fit, path)
        print(f"artifacts: {path}")
    return 0


def run_curvature(cfg: RunConfig, args=None) -> int:
    model = _build_model(cfg)
    if isinstance(model, FGMetric):
        field_obj = model.four_metric(s_floor=0.005)
        pts = _radial_points(model, np.geomspace(0.01, 0.95 * model.s_max, 6))
        orientation = 1
    else:
        field_obj = model.field
        pts = _closed_sample_points(field_obj)
        orientation = model.orientation
    pack = curvature(field_obj, pts, orientation)
    header = (list(field_obj.chart.names)
              + ["scalar", "sigma2", "traceless_ricci_sq",
                 "weyl_sq", "weyl_plus_sq", "weyl_minus_sq"])
    rows = np.column_stack([
        pts, pack.scalar, pack.sigma2, pack.norms["traceless_ricci_sq"],
        pack.norms["weyl_sq"], pack.norms["weyl_plus_sq"],
        pack.norms["weyl_minus_sq"]])
    lines = ["# curvature-packet v1", ",".join(header)]
    lines += [",".join(f"{v:.17g}" for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if getattr(args, "out", None):
        os.makedirs(cfg.output_dir, exist_ok=True)
        path = os.path.join(cfg.output_dir, "curvature.csv")
        with open(path, "w") as fh:
            fh.write(text)
        print(f"artifacts: {path}")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccegeom",
        description="conformally compact Einstein 4-manifold toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model_default=None):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--model", default=model_default,
                       help="model registry name")
        p.add_argument("--m", type=float, help="mass parameter where applicable")
        p.add_argument("--ladder",
                       help="comma-separated epsilon rungs (extended "
                            "geometrically to 8 if fewer are given)")
        p.add_argument("--tol-quadrature", type=float, dest="tol_quadrature")
        p.add_argument("--tol-fit", type=float, dest="tol_fit")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("analyze", help="full pipeline with artifacts")
    common(p)
    p = sub.add_parser("check", help="invariant suites only (CI)")
    common(p, model_default="all")
    p.add_argument("--inject-defect", action="store_true",
                   help=argparse.SUPPRESS)
    p = sub.add_parser("volume", help="renormalized-volume fit only")
    common(p)
    p = sub.add_parser("curvature", help="pointwise curvature packet dump")
    common(p)
    return parser


_COMMANDS = {
    "analyze": run_analyze,
    "check": run_check,
    "volume": run_volume,
    "curvature": run_curvature,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except CcegeomError as exc:
        print(f"{args.command} failed: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
