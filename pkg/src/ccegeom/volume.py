"""Renormalized volume by sublevel quadrature and ladder regression.

For g = s^{-2}(ds^2 + g_s) with n = 3 the sublevel volumes expand as

    Vol({s > eps}) = c0 eps^-3 + c2 eps^-1 + V + o(1),

with no eps^-2 term and V the renormalized volume. The pipeline is a
radial quadrature of s^-4 D(s) per ladder rung (the boundary volume
carries the angular integral) followed by a least-squares fit against
{eps^-3, eps^-1, 1}. Three positive tail columns {eps, eps^2, eps^3}
absorb the o(1) remainder so V is not contaminated by it; the constant
term still converges to the same V without them, just too slowly for
tight tolerances on short ladders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, FitConditioning, UnstableFit
from .quadrature import geometric_panels, integrate_refined

__all__ = [
    "DEFAULT_LADDER",
    "VolumeFit",
    "sublevel_volume",
    "fit_ladder",
    "fit_renormalized_volume",
    "extend_ladder",
    "write_volume_table",
]

#: default epsilon ladder; spans a factor 512 in the leading column
DEFAULT_LADDER = (0.4, 0.3, 0.22, 0.16, 0.12, 0.09, 0.065, 0.05)

#: negative powers of the Einstein expansion (n = 3): no eps^-2 term
_CORE_POWERS = (-3, -1, 0)
_TAIL_POWERS = (1, 2, 3)


@dataclass
class VolumeFit:
    """Ladder samples and regression coefficients of the volume expansion."""

    epsilons: np.ndarray
    volumes: np.ndarray
    c0: float
    c2: float
    V: float
    residual: float
    boundary_volume: float
    condition_number: float
    tail_coefficients: dict = field(default_factory=dict)
    even_leakage: Optional[float] = None
    stability_change: Optional[float] = None
    quadrature_errors: Optional[np.ndarray] = None


def sublevel_volume(fg, eps: float, tol: float = 1e-12) -> tuple:
    """Vol({s > eps}) and a quadrature error estimate.

    Radial reduction: boundary volume times int_eps^{s_max} s^-4 D(s) ds
    on panels graded toward eps, where the integrand varies fastest.
    """
    eps = float(eps)
    if not 0 < eps < fg.s_max:
        raise DomainError(f"eps must lie in (0, s_max={fg.s_max}), got {eps}")

    def f(s):
        return s**-4.0 * fg.density(s)

    panels = geometric_panels(eps, fg.s_max)
    res = integrate_refined(f, eps, fg.s_max, panels, order=16, tol=tol,
                            scale=max(1.0, eps**-3.0))
    vol_hat = fg.boundary.volume
    return vol_hat * res.value, vol_hat * res.error_estimate


def _powers_matrix(eps: np.ndarray, powers) -> np.ndarray:
    return np.stack([eps**float(k) for k in powers], axis=1)


def fit_ladder(epsilons, volumes, boundary_volume: float,
               tail_powers=_TAIL_POWERS, diagnose_even: bool = False,
               stability_gate: Optional[float] = 1e-3) -> VolumeFit:
    """Regress ladder samples against the volume expansion basis.

    Pure function of the samples, so synthetic data can exercise the
    regression exactly. diagnose_even adds an eps^-2 column whose fitted
    coefficient must be negligible for Einstein inputs. stability_gate,
    when set, refits without the largest rung and raises UnstableFit if
    V moves by more than the gate.
    """
    eps = np.asarray(epsilons, dtype=float)
    vols = np.asarray(volumes, dtype=float)
    if eps.ndim != 1 or eps.size != vols.size:
        raise DomainError("epsilons and volumes must be 1-d and equal length")
    if eps.size < 5:
        raise DomainError("ladder needs at least 5 rungs")
    if np.any(np.diff(eps) >= 0):
        raise DomainError("ladder must be strictly decreasing")
    if (eps[0] / eps[-1]) ** 3 < 10.0:
        raise DomainError("ladder too short: leading column must span a decade")
    powers = list(_CORE_POWERS) + list(tail_powers)
    if diagnose_even:
        powers = powers + [-2]
    if eps.size < len(powers):
        raise DomainError(
            f"ladder has {eps.size} rungs but the basis needs {len(powers)}"
        )

    def solve(e, v):
        cols = _powers_matrix(e, powers)
        scale = np.linalg.norm(cols, axis=0)
        cond = float(np.linalg.cond(cols / scale))
        if cond > 1e8:
            raise FitConditioning(
                f"volume design matrix condition {cond:.2e} > 1e8"
            )
        coef, *_ = np.linalg.lstsq(cols / scale, v, rcond=None)
        coef = coef / scale
        resid = float(np.max(np.abs(cols @ coef - v)))
        return coef, cond, resid

    coef, cond, resid = solve(eps, vols)
    by_power = dict(zip(powers, coef))
    stability = None
    if stability_gate is not None:
        coef2, _, _ = solve(eps[1:], vols[1:])
        stability = abs(coef2[powers.index(0)] - by_power[0])
        if stability > stability_gate:
            raise UnstableFit(
                f"renormalized volume moved {stability:.2e} when the largest "
                f"rung was dropped (gate {stability_gate:.1e}); the ladder "
                "does not resolve the constant term"
            )
    return VolumeFit(
        epsilons=eps,
        volumes=vols,
        c0=float(by_power[-3]),
        c2=float(by_power[-1]),
        V=float(by_power[0]),
        residual=resid,
        boundary_volume=float(boundary_volume),
        condition_number=cond,
        tail_coefficients={k: float(by_power[k]) for k in tail_powers},
        even_leakage=float(by_power[-2]) if diagnose_even else None,
        stability_change=stability,
    )


def fit_renormalized_volume(fg, ladder=None, quad_tol: float = 1e-12,
                            tail_powers=_TAIL_POWERS,
                            diagnose_even: bool = False,
                            stability_gate: Optional[float] = 1e-3) -> VolumeFit:
    """Sublevel volumes on the ladder, then the expansion regression.

    The default gate only rejects fits whose constant term is clearly
    unresolved; pass a tighter stability_gate when the application needs
    V to better than a part in a thousand (the drop-one-rung drift is
    also reported on the result for inspection).
    """
    ladder = np.asarray(DEFAULT_LADDER if ladder is None else ladder, dtype=float)
    samples = [sublevel_volume(fg, e, tol=quad_tol) for e in ladder]
    vols = np.asarray([v for v, _ in samples])
    errs = np.asarray([e for _, e in samples])
    fit = fit_ladder(ladder, vols, fg.boundary.volume,
                     tail_powers=tail_powers,
                     diagnose_even=diagnose_even,
                     stability_gate=stability_gate)
    fit.quadrature_errors = errs
    return fit


def extend_ladder(rungs, target: int = 8, ratio: float = 0.7) -> np.ndarray:
    """Continue a short ladder geometrically until it has target rungs.

    Used by the command-line layer so a handful of user-supplied rungs
    still meets the regression's conditioning needs; extension uses a
    fixed ratio so the deepest rung stays well inside double precision.
    """
    out = [float(r) for r in rungs]
    if len(out) < 2 or any(b >= a for a, b in zip(out, out[1:])):
        if len(out) == 1:
            out = [out[0]]
        else:
            raise DomainError("ladder rungs must be strictly decreasing")
    while len(out) < target:
        out.append(out[-1] * ratio)
    return np.asarray(out)


def write_volume_table(fit: VolumeFit, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        fh.write("# volume-ladder v1\n")
        writer = csv.writer(fh)
        writer.writerow(["epsilon", "volume", "fit_value", "deviation"])
        cols = _powers_matrix(fit.epsilons, list(_CORE_POWERS) + sorted(fit.tail_coefficients))
        coef = np.asarray([fit.c0, fit.c2, fit.V]
                          + [fit.tail_coefficients[k] for k in sorted(fit.tail_coefficients)])
        fitted = cols @ coef
        for e, v, f in zip(fit.epsilons, fit.volumes, fitted):
            writer.writerow([f"{e:.17g}", f"{v:.17g}", f"{f:.17g}", f"{v - f:.3e}"])
