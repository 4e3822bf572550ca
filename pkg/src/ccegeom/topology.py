"""Decision inequalities tying renormalized volume to interior topology.

For a conformally compact Einstein 4-manifold with positive-Yamabe
conformal boundary, the renormalized volume V is bounded above by the
hyperbolic value 4 pi^2/3, and lower bounds on V relative to the Euler
characteristic force the interior to be topologically trivial: above a
third of the hyperbolic value per unit characteristic the interior is a
4-ball up to finite cover, and above half it is diffeomorphic to the
ball outright, with 3-sphere boundary. The second family of checks
works on the closed double: when the Weyl energy is small against the
integrated second elementary symmetric function of the Schouten tensor,
self-dual (or anti-self-dual, or all) second cohomology vanishes.

Everything here is exact arithmetic on previously computed invariants;
the only numerics is a comparison tolerance. Strict hypotheses never
pass silently: values within tolerance of a threshold get an explicit
"boundary" verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotAvailable

__all__ = [
    "BALL_VOLUME",
    "Check",
    "volume_upper_bound",
    "finite_cover_ball_criterion",
    "diffeomorphism_ball_criterion",
    "homology_vanishing_criteria",
    "feasible_betti_parameters",
    "pointwise_pinching_margin",
    "TopologyReport",
    "build_topology_report",
    "render_topology_report",
    "topology_document",
]

#: renormalized volume of the hyperbolic model, the extremal value
BALL_VOLUME = 4.0 * np.pi**2 / 3.0

#: default absolute tolerance separating pass/fail from "boundary"
COMPARISON_TOL = 1e-9


@dataclass(frozen=True)
class Check:
    """One evaluated inequality: value `comparison` threshold.

    margin is always value - threshold, so the verdict is reproducible
    from the record alone. verdict "boundary" means |margin| fell
    within the comparison tolerance: a strict hypothesis is neither
    satisfied nor refuted at this precision.
    """

    name: str
    value: float
    threshold: float
    comparison: str
    margin: float
    verdict: str
    note: str = ""


def _evaluate(name: str, value: float, threshold: float, comparison: str,
              tol: float, note: str = "", boundary_note: str = "") -> Check:
    value = float(value)
    threshold = float(threshold)
    margin = value - threshold
    if abs(margin) <= tol:
        verdict = "boundary"
        if boundary_note:
            note = f"{note}; {boundary_note}" if note else boundary_note
    elif comparison == ">":
        verdict = "pass" if margin > 0 else "fail"
    elif comparison == "<":
        verdict = "pass" if margin < 0 else "fail"
    elif comparison == "<=":
        verdict = "pass" if margin <= 0 else "fail"
    else:
        raise ValueError(f"unknown comparison {comparison!r}")
    return Check(name, value, threshold, comparison, margin, verdict, note)


def _require_yamabe(yamabe_positive: bool):
    if not yamabe_positive:
        raise NotAvailable(
            "this inequality assumes a positive-Yamabe conformal boundary; "
            "the hypothesis flag is false"
        )


def volume_upper_bound(volume: float, yamabe_positive: bool,
                       tol: float = COMPARISON_TOL) -> Check:
    """V <= 4 pi^2/3, with the equality case flagged as rigidity.

    Equality holds exactly for the hyperbolic model (round-sphere
    boundary), so a value at the threshold is reported as the rigidity
    case rather than a pass. A clear violation means the inputs cannot
    come from a positive-Yamabe conformally compact Einstein metric.
    """
    _require_yamabe(yamabe_positive)
    check = _evaluate(
        "volume-upper-bound", volume, BALL_VOLUME, "<=", tol,
        boundary_note="equality: rigidity, the metric is the hyperbolic "
                      "model and the boundary the round sphere",
    )
    if check.verdict == "fail":
        check = Check(check.name, check.value, check.threshold,
                      check.comparison, check.margin, check.verdict,
                      "no positive-Yamabe conformally compact Einstein "
                      "metric attains this volume; inputs are inconsistent")
    return check


def finite_cover_ball_criterion(chi: int, volume: float,
                                yamabe_positive: bool,
                                tol: float = COMPARISON_TOL):
    """V > (1/3)(4 pi^2/3) chi forces ball topology up to finite cover.

    Returns (check, conclusions). On a strict pass the interior is
    homeomorphic to the 4-ball up to a possible finite cover
    (equivalently the fundamental group is at most finite), with the
    intermediate facts recorded: the volume is positive, first and
    second real cohomology vanish, and the integrated sigma2 of the
    double is positive.
    """
    _require_yamabe(yamabe_positive)
    check = _evaluate("finite-cover-ball", volume,
                      BALL_VOLUME * chi / 3.0, ">", tol,
                      note=f"chi = {int(chi)}")
    conclusions = ()
    if check.verdict == "pass":
        conclusions = (
            "interior homeomorphic to the 4-ball up to a possible finite "
            "cover (fundamental group at most finite)",
            "renormalized volume positive; first and second real "
            "cohomology of the interior vanish",
            "integrated sigma2 of the closed double is positive",
        )
    return check, conclusions


def diffeomorphism_ball_criterion(chi: int, volume: float,
                                  yamabe_positive: bool,
                                  tol: float = COMPARISON_TOL):
    """V > (1/2)(4 pi^2/3) chi forces the ball outright.

    Returns (checks, conclusions): the volume check plus the equivalent
    doubled-manifold form (1/4) int |W|^2 < int sigma2, both sides
    recomputed from (chi, V) through the volume identity
    8 pi^2 chi = (1/4) int |W|^2 + 6V and the closed Gauss-Bonnet
    formula. On a strict pass the interior is diffeomorphic to the
    4-ball, the boundary to the 3-sphere, and the double to the
    4-sphere.
    """
    _require_yamabe(yamabe_positive)
    main = _evaluate("diffeomorphism-ball", volume,
                     0.5 * BALL_VOLUME * chi, ">", tol,
                     note=f"chi = {int(chi)}")
    weyl_quarter = 16.0 * np.pi**2 * chi - 12.0 * volume
    doubled = _evaluate("doubled-weyl-vs-sigma2", weyl_quarter,
                        12.0 * volume, "<", tol,
                        note="same inequality written on the double: "
                             "(1/4) int |W|^2 against int sigma2, both "
                             "derived from (chi, V)")
    conclusions = ()
    if main.verdict == "pass":
        conclusions = (
            "interior diffeomorphic to the 4-ball; boundary diffeomorphic "
            "to the 3-sphere",
            "closed double diffeomorphic to the 4-sphere",
        )
    return (main, doubled), conclusions


def homology_vanishing_criteria(suite, tol: float = COMPARISON_TOL):
    """Weyl-energy versus sigma2 checks on a closed double.

    Three strict inequalities: (1/4) int |W+|^2 < int sigma2 kills the
    self-dual part of second cohomology, the mirror check kills the
    anti-self-dual part, and (1/4) int |W|^2 < 2 int sigma2 (their sum)
    kills all of it. suite is an IntegralSuite of the double.
    """
    s2 = float(suite.sigma2_integral)
    checks = (
        _evaluate("selfdual-homology", 0.25 * float(suite.weyl_plus),
                  s2, "<", tol,
                  note="pass kills self-dual second cohomology"),
        _evaluate("antiselfdual-homology", 0.25 * float(suite.weyl_minus),
                  s2, "<", tol,
                  note="pass kills anti-self-dual second cohomology"),
        _evaluate("full-homology", 0.25 * float(suite.weyl_energy),
                  2.0 * s2, "<", tol,
                  note="pass kills all second cohomology"),
    )
    return checks


def feasible_betti_parameters(k_max: int = 100) -> set:
    """Betti parameters surviving the integrated pinching inequality.

    On a closed double with vanishing first cohomology, vanishing
    self-dual second cohomology and anti-self-dual dimension 2k, the
    Euler characteristic is 2 + 2k and the signature -2k. The
    inequality 2 chi + 3 tau > (2/3) chi then reads 4 - 2k > (4+4k)/3,
    which only k = 0 satisfies; the sweep makes that explicit instead
    of trusting the algebra.
    """
    feasible = set()
    for k in range(0, int(k_max) + 1):
        chi = 2 + 2 * k
        tau = -2 * k
        if 2 * chi + 3 * tau > (2.0 / 3.0) * chi:
            feasible.add(k)
    return feasible


def pointwise_pinching_margin(sigma2, weyl_sq) -> float:
    """min(sigma2 - |W|^2/4) over curvature samples, informational.

    Positive margin is the pointwise pinching that feeds the sphere
    recognition on the double; it is reported, never used as a gate.
    """
    sigma2 = np.asarray(sigma2, dtype=float)
    weyl_sq = np.asarray(weyl_sq, dtype=float)
    if sigma2.shape != weyl_sq.shape:
        raise ValueError("sigma2 and weyl_sq sample arrays must align")
    return float(np.min(sigma2 - 0.25 * weyl_sq))


@dataclass(frozen=True)
class TopologyReport:
    """All decision checks for one model, with licensed conclusions.

    conclusions pair each statement with the name of the single check
    that licenses it; when the volume identity residual exceeds its
    tolerance the report keeps the raw checks but refuses every
    conclusion and says why.
    """

    inputs: dict
    checks: tuple
    conclusions: tuple
    consistent: bool
    notes: tuple


def build_topology_report(chi: int, volume: float, yamabe_positive: bool,
                          double_suite=None,
                          identity_residual: Optional[float] = None,
                          identity_tol: float = 1e-3,
                          tol: float = COMPARISON_TOL) -> TopologyReport:
    """Assemble the full decision report from computed invariants.

    identity_residual is the relative defect of
    8 pi^2 chi = (1/4) int |W|^2 + 6V measured upstream; when it is
    supplied and too large the numbers feeding the inequalities cannot
    all be right, so conclusions are withheld.
    """
    inputs = {
        "chi": int(chi),
        "volume": float(volume),
        "yamabe_positive": bool(yamabe_positive),
        "identity_residual": (None if identity_residual is None
                              else float(identity_residual)),
    }
    checks = [volume_upper_bound(volume, yamabe_positive, tol)]
    notes = []

    cover_check, cover_conc = finite_cover_ball_criterion(
        chi, volume, yamabe_positive, tol)
    checks.append(cover_check)
    diffeo_checks, diffeo_conc = diffeomorphism_ball_criterion(
        chi, volume, yamabe_positive, tol)
    checks.extend(diffeo_checks)

    if double_suite is not None:
        hom = homology_vanishing_criteria(double_suite, tol)
        checks.extend(hom)
        inputs["double_sigma2"] = float(double_suite.sigma2_integral)
        inputs["double_weyl_sq"] = float(double_suite.weyl_energy)
        inputs["double_weyl_plus_sq"] = float(double_suite.weyl_plus)
        inputs["double_weyl_minus_sq"] = float(double_suite.weyl_minus)

    conclusions = [(c, cover_check.name) for c in cover_conc]
    conclusions += [(c, diffeo_checks[0].name) for c in diffeo_conc]

    consistent = True
    if checks[0].verdict == "fail":
        consistent = False
        notes.append("volume exceeds the universal upper bound: inputs "
                     "inconsistent, conclusions withheld")
    if identity_residual is not None and identity_residual > identity_tol:
        consistent = False
        notes.append(
            f"volume identity residual {identity_residual:.3e} exceeds "
            f"{identity_tol:.1e}: chi, Weyl energy and V disagree, "
            "conclusions withheld"
        )
    if not consistent:
        conclusions = []

    return TopologyReport(inputs=inputs, checks=tuple(checks),
                          conclusions=tuple(conclusions),
                          consistent=consistent, notes=tuple(notes))


def render_topology_report(report: TopologyReport) -> str:
    """Human-readable block, one line per check plus conclusions."""
    lines = ["topology checks"]
    for key, val in sorted(report.inputs.items()):
        lines.append(f"  input {key} = {val}")
    for c in report.checks:
        lines.append(
            f"  [{c.verdict:>8}] {c.name}: {c.value:.10g} {c.comparison} "
            f"{c.threshold:.10g} (margin {c.margin:+.3e})"
            + (f"  -- {c.note}" if c.note else "")
        )
    for note in report.notes:
        lines.append(f"  note: {note}")
    if report.conclusions:
        lines.append("  conclusions:")
        for text, source in report.conclusions:
            lines.append(f"    - {text} [via {source}]")
    else:
        lines.append("  conclusions: none")
    return "\n".join(lines)


def topology_document(report: TopologyReport) -> dict:
    """Machine-readable mirror of render_topology_report."""
    return {
        "inputs": {k: report.inputs[k] for k in sorted(report.inputs)},
        "checks": [
            {
                "name": c.name,
                "value": c.value,
                "threshold": c.threshold,
                "comparison": c.comparison,
                "margin": c.margin,
                "verdict": c.verdict,
                "note": c.note,
            }
            for c in report.checks
        ],
        "conclusions": [
            {"statement": text, "via": source}
            for text, source in report.conclusions
        ],
        "consistent": report.consistent,
        "notes": list(report.notes),
    }
