"""Model catalogue: metadata, reference values, and parameter validation."""

from fractions import Fraction

import numpy as np
import pytest

from ccegeom import models
from ccegeom.errors import ModelParameterError, NotAvailable
from ccegeom.tensor import einstein_residual


def _radial_points(fg, svals):
    n = len(svals)
    pad = [np.full(n, 0.9), np.full(n, 1.1), np.full(n, 1.3)]
    return np.column_stack([np.asarray(svals)] + pad)


def test_registry_lists_both_families():
    names = models.model_names()
    assert set(names) == {"closed", "conformally_compact"}
    assert "round_sphere" in names["closed"]
    assert "ads_schwarzschild" in names["conformally_compact"]
    for group in names.values():
        for nm in group:
            assert models.build(nm) is not None


def test_build_rejects_unknown_name():
    with pytest.raises(ModelParameterError, match="unknown model"):
        models.build("klein_bottle")


def test_closed_model_metadata():
    table = {
        # name: (euler, signature, volume, orientation)
        "round_sphere": (2, 0, 8 * np.pi ** 2 / 3, 1),
        "flat_torus": (0, 0, (2 * np.pi) ** 4, 1),
        "product_spheres": (4, 0, 16 * np.pi ** 2, 1),
        "fubini_study": (3, 1, np.pi ** 2 / 2, -1),
    }
    for nm, (chi, tau, vol, orient) in table.items():
        mdl = models.build(nm)
        assert mdl.euler == chi
        assert mdl.signature == tau
        assert mdl.volume == pytest.approx(vol, rel=1e-12)
        assert mdl.orientation == orient


def test_einstein_models_have_tiny_residual(hyperbolic, ads):
    pts = _radial_points(hyperbolic, np.linspace(0.1, 1.6, 6))
    assert np.max(einstein_residual(hyperbolic.four_metric(s_floor=0.05), pts)) < 1e-9
    pts = _radial_points(ads, np.linspace(0.1, 0.9 * ads.s_max, 6))
    assert np.max(einstein_residual(ads.four_metric(s_floor=0.05), pts)) < 1e-9


def test_perturbed_model_is_not_einstein(perturbed):
    pts = _radial_points(perturbed, np.linspace(0.2, 1.4, 6))
    res = einstein_residual(perturbed.four_metric(s_floor=0.05), pts)
    assert np.max(res) > 1e-1
    assert not perturbed.einstein
    assert perturbed.parameters == {"amplitude": 0.05}


def test_horizon_radius_and_period():
    # r_+^3 + r_+ = 2m, so m = 1 gives r_+ = 1 exactly
    assert models.horizon_radius(1.0) == pytest.approx(1.0, abs=1e-14)
    for m in (0.3, 1.0, 2.5, 7.0):
        rp = models.horizon_radius(m)
        assert rp ** 3 + rp == pytest.approx(2 * m, rel=1e-13)
    fg = models.ads_schwarzschild(m=1.0)
    ref = models.exact_reference("ads_schwarzschild", m=1.0)
    assert ref["period"] == pytest.approx(np.pi, abs=1e-14)
    assert ref["horizon_radius"] == pytest.approx(1.0, abs=1e-14)
    assert fg.s_max == pytest.approx(1.348093076044499, abs=1e-12)


def test_exact_reference_hyperbolic_entries():
    ref = models.exact_reference("hyperbolic")
    assert ref["renormalized_volume"] == pytest.approx(4 * np.pi ** 2 / 3, rel=1e-14)
    assert ref["c0"] == pytest.approx(2 * np.pi ** 2 / 3, rel=1e-12)
    assert ref["c2"] == pytest.approx(-1.5 * np.pi ** 2, rel=1e-12)
    assert ref["w2"] == Fraction(1, 4)
    assert ref["compactified_scalar"] == 12.0
    assert ref["euler"] == 1
    s = np.linspace(0.05, 1.9, 11)
    assert np.allclose(ref["eigenfunction"](s), 1.0 / s + s / 4.0)
    assert np.allclose(ref["warp"](s), (1.0 - s ** 2 / 4.0) ** 2)


def test_exact_reference_scaled_boundary():
    lam = 2.0
    ref = models.exact_reference("hyperbolic", boundary_radius=lam)
    # the renormalized volume is a conformal invariant of the filling
    assert ref["renormalized_volume"] == pytest.approx(4 * np.pi ** 2 / 3, rel=1e-14)
    assert ref["boundary_volume"] == pytest.approx(2 * np.pi ** 2 * lam ** 3, rel=1e-13)
    assert ref["c0"] == pytest.approx(2 * np.pi ** 2 * lam ** 3 / 3, rel=1e-12)


def test_exact_reference_ads_entries():
    ref = models.exact_reference("ads_schwarzschild", m=1.0)
    assert ref["w2"] == Fraction(1, 12)
    beta, rp = np.pi, 1.0
    assert ref["weyl_energy"] == pytest.approx(64 * np.pi * beta * 1.0 / rp ** 3, rel=1e-13)
    assert ref["weyl_energy"] == pytest.approx(64 * np.pi ** 2, rel=1e-13)
    assert ref["euler"] == 2
    assert ref["boundary_volume"] == pytest.approx(4 * np.pi * beta, rel=1e-13)


def test_exact_reference_single_quantity_and_gaps():
    v = models.exact_reference("hyperbolic", "renormalized_volume")
    assert v == pytest.approx(4 * np.pi ** 2 / 3, rel=1e-14)
    with pytest.raises(NotAvailable):
        models.exact_reference("ads_schwarzschild", "renormalized_volume", m=1.0)
    with pytest.raises(NotAvailable):
        models.exact_reference("klein_bottle")
    with pytest.raises(NotAvailable):
        models.exact_reference("hyperbolic", "magic_number")


def test_parameter_validation():
    with pytest.raises(ModelParameterError, match="positive"):
        models.round_sphere4(radius=-1.0)
    with pytest.raises(ModelParameterError, match="positive"):
        models.hyperbolic(boundary_radius=0.0)
    with pytest.raises(ModelParameterError, match="positive"):
        models.ads_schwarzschild(m=-2.0)
    with pytest.raises(ModelParameterError, match="amplitude"):
        models.perturbed_hyperbolic(amplitude=1.5)


def test_boundary_geometry_catalogue():
    bdry = models.round_sphere_boundary(radius=1.0)
    assert bdry.dim == 3
    circ = models.circle_sphere_boundary(length=2 * np.pi, radius=1.0)
    assert circ.dim == 3
    tor = models.flat_torus_boundary()
    assert tor.dim == 3
    berger = models.berger_sphere_boundary(lam=0.8)
    assert berger.dim == 3


def test_fg_metric_metadata(hyperbolic, ads, perturbed):
    assert hyperbolic.einstein and ads.einstein
    assert hyperbolic.n == 3 and ads.n == 3
    assert hyperbolic.s_max == pytest.approx(2.0)
    assert hyperbolic.yamabe_positive
    # scalar curvature of the chosen boundary representatives
    assert hyperbolic.boundary.scalar_curvature == pytest.approx(6.0)
    assert ads.boundary.scalar_curvature == pytest.approx(2.0)
    assert perturbed.boundary.scalar_curvature == pytest.approx(6.0)
    assert hyperbolic.boundary.volume == pytest.approx(2 * np.pi ** 2, rel=1e-13)
