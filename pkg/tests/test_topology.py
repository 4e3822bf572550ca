"""Decision criteria wired to the integral identities."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccegeom import topology as tp
from ccegeom.errors import NotAvailable
from ccegeom.integrals import doubled_suite


def test_ball_volume_constant():
    assert tp.BALL_VOLUME == pytest.approx(4 * np.pi ** 2 / 3, rel=1e-15)


def test_volume_upper_bound():
    check = tp.volume_upper_bound(13.0, True)
    assert check.verdict == "pass"
    assert check.margin == pytest.approx(13.0 - 4 * np.pi ** 2 / 3, abs=1e-12)
    # equality is the rigidity case, reported as its own verdict
    edge = tp.volume_upper_bound(tp.BALL_VOLUME, True)
    assert edge.verdict == "boundary"
    assert "rigidity" in edge.note
    above = tp.volume_upper_bound(tp.BALL_VOLUME + 1e-6, True)
    assert above.verdict == "fail"
    assert "inconsistent" in above.note
    with pytest.raises(NotAvailable, match="Yamabe"):
        tp.volume_upper_bound(13.0, False)


def test_finite_cover_ball_criterion():
    check, conclusions = tp.finite_cover_ball_criterion(1, 13.0, True)
    assert check.verdict == "pass"
    assert check.threshold == pytest.approx(4 * np.pi ** 2 / 9, rel=1e-12)
    assert len(conclusions) == 3
    assert any("finite cover" in c for c in conclusions)
    # too little volume: no conclusion
    check2, conclusions2 = tp.finite_cover_ball_criterion(2, 3.0, True)
    assert check2.verdict == "fail"
    assert conclusions2 == ()


def test_diffeomorphism_ball_criterion():
    (direct, doubled), conclusions = tp.diffeomorphism_ball_criterion(1, 13.0, True)
    assert direct.verdict == "pass" and doubled.verdict == "pass"
    assert direct.threshold == pytest.approx(2 * np.pi ** 2 / 3, rel=1e-12)
    # the doubled restatement carries Gauss-Bonnet numbers
    assert doubled.value == pytest.approx(16 * np.pi ** 2 - 12 * 13.0, abs=1e-9)
    assert doubled.threshold == pytest.approx(12 * 13.0, abs=1e-12)
    assert any("diffeomorphic to the 4-ball" in c for c in conclusions)
    assert any("4-sphere" in c for c in conclusions)
    (direct2, doubled2), conclusions2 = tp.diffeomorphism_ball_criterion(2, 3.0, True)
    assert direct2.verdict == "fail" and doubled2.verdict == "fail"
    assert conclusions2 == ()


def test_stronger_criterion_implies_weaker(rng):
    """Whenever the diffeomorphism bound passes, the finite-cover bound must."""
    for _ in range(1000):
        chi = int(rng.integers(1, 4))
        v = float(rng.uniform(0.05, 20.0))
        (direct, _), _ = tp.diffeomorphism_ball_criterion(chi, v, True)
        weaker, _ = tp.finite_cover_ball_criterion(chi, v, True)
        if direct.verdict == "pass":
            assert weaker.verdict == "pass"


@settings(max_examples=200, deadline=None)
@given(chi=st.integers(min_value=1, max_value=6),
       v1=st.floats(min_value=0.01, max_value=40.0),
       bump=st.floats(min_value=1e-6, max_value=40.0))
def test_criteria_monotone_in_volume(chi, v1, bump):
    a1, _ = tp.finite_cover_ball_criterion(chi, v1, True)
    a2, _ = tp.finite_cover_ball_criterion(chi, v1 + bump, True)
    assert a2.margin > a1.margin
    if a1.verdict == "pass":
        assert a2.verdict == "pass"


def test_doubled_form_is_the_same_inequality(rng):
    """16 pi^2 chi - 12V < 12V is algebra for V > 2 pi^2 chi / 3."""
    for _ in range(400):
        chi = int(rng.integers(1, 5))
        v = float(rng.uniform(0.05, 25.0))
        if abs(v - 2 * np.pi ** 2 * chi / 3) < 1e-6:
            continue
        (direct, doubled), _ = tp.diffeomorphism_ball_criterion(chi, v, True)
        assert direct.verdict == doubled.verdict


def test_homology_vanishing_on_round_double(sphere_suite):
    """The round 4-sphere is the double of the compactified hyperbolic
    ball, and every homology check passes strictly there."""
    _, suite = sphere_suite
    for check in tp.homology_vanishing_criteria(suite):
        assert check.verdict == "pass"
        assert check.margin < 0


def test_homology_checks_are_sharp_on_product_double(product_suite):
    """Doubling S^2 x S^2 lands exactly on the threshold: its second
    cohomology is the known obstruction, so nothing may pass strictly."""
    _, suite = product_suite
    for check in tp.homology_vanishing_criteria(doubled_suite(suite)):
        assert check.verdict == "boundary"
        assert check.margin == pytest.approx(0.0, abs=1e-7)


def test_feasible_betti_sweep():
    assert tp.feasible_betti_parameters(100) == {0}
    # brute-force oracle over the same range
    expect = {k for k in range(101)
              if 2 * (2 + 2 * k) + 3 * (-2 * k) > (2.0 / 3.0) * (2 + 2 * k)}
    assert expect == {0}


def test_pointwise_pinching_margin():
    margin = tp.pointwise_pinching_margin(
        np.array([1.0, 2.0]), np.array([0.5, 8.0]))
    assert margin == pytest.approx(0.0, abs=1e-12)
    assert tp.pointwise_pinching_margin(np.array([1.0]), np.array([1.0])) \
        == pytest.approx(0.75)
    with pytest.raises(ValueError, match="align"):
        tp.pointwise_pinching_margin(np.ones(3), np.ones(4))


def test_full_report_on_hyperbolic_data(hyp_fit, sphere_suite):
    _, sphere = sphere_suite
    rep = tp.build_topology_report(1, hyp_fit.V, True, double_suite=sphere,
                                   identity_residual=1e-9)
    assert rep.consistent
    assert len(rep.conclusions) >= 4
    text = tp.render_topology_report(rep)
    assert "volume-upper-bound" in text
    assert "[" in text and "pass" in text
    names = [c.name for c in rep.checks]
    assert "finite-cover-ball" in names
    assert "selfdual-homology" in names


def test_report_consistency_gate(hyp_fit):
    rep = tp.build_topology_report(1, hyp_fit.V, True, identity_residual=5e-3)
    assert not rep.consistent
    assert rep.conclusions == ()
    assert any("identity" in note for note in rep.notes)


def test_topology_document(hyp_fit, sphere_suite):
    _, sphere = sphere_suite
    rep = tp.build_topology_report(1, hyp_fit.V, True, double_suite=sphere,
                                   identity_residual=1e-9)
    doc = tp.topology_document(rep)
    assert doc["consistent"] is True
    assert doc["inputs"]["chi"] == 1
    assert len(doc["checks"]) == len(rep.checks)
    by_name = {c["name"]: c for c in doc["checks"]}
    for check in rep.checks:
        row = by_name[check.name]
        assert row["verdict"] == check.verdict
        assert row["value"] == pytest.approx(check.value)
        assert row["threshold"] == pytest.approx(check.threshold)
    assert len(doc["conclusions"]) == len(rep.conclusions)
    for entry in doc["conclusions"]:
        assert entry["statement"]
        assert entry["via"]
