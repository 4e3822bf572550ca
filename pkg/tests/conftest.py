"""Shared fixtures: models and the expensive solves, computed once."""

import numpy as np
import pytest

from ccegeom import models
from ccegeom.eigenfunction import compactification_checks, solve_eigenfunction
from ccegeom.integrals import integrate_curvature
from ccegeom.normal_form import ProfileBlock, RadialProfile, normal_form_from_profile
from ccegeom.volume import fit_renormalized_volume


@pytest.fixture(scope="session")
def hyperbolic():
    return models.build("hyperbolic")


@pytest.fixture(scope="session")
def ads():
    return models.build("ads_schwarzschild", m=1.0)


@pytest.fixture(scope="session")
def perturbed():
    return models.build("perturbed_hyperbolic")


@pytest.fixture(scope="session")
def hyperbolic_profile():
    """The hyperbolic metric again, but built from a radial profile.

    Substituting r = (2 - s) / (2 + s) (upper boundary at r = 1) puts
    the warp at 4 r^2 / (1 - r^2)^2 with radial factor 2 / (1 - r^2),
    which exercises the arc-length/spline path of the normal form.
    """
    bnd = models.round_sphere_boundary()
    prof = RadialProfile(
        name="hyperbolic-profile",
        boundary=bnd,
        blocks=(ProfileBlock(
            (0, 1, 2),
            lambda y: 4.0 * y**2 / (1.0 - y**2) ** 2,
            lambda y: 8.0 * y * (1.0 + y**2) / (1.0 - y**2) ** 3,
            lambda y: 8.0 * (1.0 + 8.0 * y**2 + 3.0 * y**4) / (1.0 - y**2) ** 4,
        ),),
        radial_factor=lambda y: 2.0 / (1.0 - y**2),
        radial_factor_deriv=lambda y: 4.0 * y / (1.0 - y**2) ** 2,
        r_interior=0.0,
        r_boundary=1.0,
        boundary_side="upper",
        tip_multiplicity=3,
        einstein=True,
    )
    return normal_form_from_profile(prof)


@pytest.fixture(scope="session")
def hyp_solution(hyperbolic):
    return solve_eigenfunction(hyperbolic)


@pytest.fixture(scope="session")
def ads_solution(ads):
    return solve_eigenfunction(ads)


@pytest.fixture(scope="session")
def pert_solution(perturbed):
    return solve_eigenfunction(perturbed)


@pytest.fixture(scope="session")
def hyp_checks(hyp_solution):
    return compactification_checks(hyp_solution)


@pytest.fixture(scope="session")
def ads_checks(ads_solution):
    return compactification_checks(ads_solution)


@pytest.fixture(scope="session")
def pert_checks(pert_solution):
    return compactification_checks(pert_solution)


@pytest.fixture(scope="session")
def hyp_fit(hyperbolic):
    return fit_renormalized_volume(hyperbolic)


def _suite(name):
    mdl = models.build(name)
    return mdl, integrate_curvature(mdl.field, mdl.domain,
                                    orientation=mdl.orientation)


@pytest.fixture(scope="session")
def sphere_suite():
    return _suite("round_sphere")


@pytest.fixture(scope="session")
def torus_suite():
    return _suite("flat_torus")


@pytest.fixture(scope="session")
def product_suite():
    return _suite("product_spheres")


@pytest.fixture(scope="session")
def cp2_suite():
    return _suite("fubini_study")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260816)
