import numpy as np
import pytest

from pma_radial import pde
from pma_radial.constants import growth_exponent, leading_coefficient
from pma_radial.errors import CoverageMismatch
from pma_radial.solution import PiecewiseSolution

GRID = pde.SpaceTimeGrid.geometric()


def test_default_grid_shape():
    assert GRID.radii.size == 64 and GRID.times.size == 32 and GRID.samples == 2048
    assert GRID.times.max() == pytest.approx(-0.01) and GRID.radii.max() == pytest.approx(1e3)


def test_grid_validation():
    with pytest.raises(ValueError):
        pde.SpaceTimeGrid([0.0, 1.0], [-1.0])
    with pytest.raises(ValueError):
        pde.SpaceTimeGrid([1.0], [0.0])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_residual_reference(ref, n):
    rep = pde.residual(ref(n, 1e4), GRID)
    assert rep.max_abs_residual <= 1e-6
    assert rep.time_factor_defect <= 1e-14
    # the failure, if any, sits in the profile factor
    assert rep.max_abs_residual == pytest.approx(rep.profile_defect, abs=1e-14)


def test_residual_with_nonzero_w0(ref):
    assert pde.residual(ref(2, 1e4), GRID, w0=1.5).max_abs_residual <= 1e-6


def test_residual_coverage(ref):
    with pytest.raises(CoverageMismatch):
        pde.residual(ref(2, 10.0), GRID)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_liouville_model_exact(n):
    rep = pde.liouville_residual(GRID, n)
    assert rep.max_abs_residual == 0.0


def test_convexity(ref):
    assert pde.parabolic_convexity(ref(3, 1e4), GRID)
    knots = np.linspace(0, 1e3, 2001)
    bad = PiecewiseSolution.from_function(2, knots, lambda r: 1 + r - r**2, lambda r: 1 - 2 * r,
                                          lambda r: -2 + 0 * r)
    assert not pde.parabolic_convexity(bad, GRID)


def test_hessian_eigenvalue_ordering_in_tail(ref):
    sol = ref(4, 1e4)
    r = np.geomspace(1e2, 1e4, 20)
    radial_ev, tangential_ev = pde.hessian_eigenvalues(sol, r, -1.0)
    assert np.all(tangential_ev >= radial_ev)


def test_axis_limits(ref):
    sol = ref(3, 10.0)
    r = 1e-7
    assert sol(r, 2) == pytest.approx(1.0, abs=1e-9)
    assert sol(r, 1) / r == pytest.approx(1.0, abs=1e-9)


def test_ut_unboundedness_examples(ref):
    sol = ref(2, 10.0)
    check = pde.ut_unboundedness(sol, [-1e3, -1e-6])
    assert check.ut_min_seen == pytest.approx(-(3e-6) ** (-2 / 3), rel=1e-12)
    assert check.ut_min_seen == pytest.approx(-4807, abs=1)
    assert check.ut_max_seen == pytest.approx(-(3000) ** (-2 / 3), rel=1e-12)
    assert check.ut_max_seen == pytest.approx(-0.0048, abs=1e-4)
    assert check.m1_m2_exist is False


def test_ut_requires_wide_span(ref):
    with pytest.raises(ValueError):
        pde.ut_unboundedness(ref(2, 10.0), [-1.0, -0.5])


def test_ratio_to_u0(ref):
    sol = ref(4, 1e6)
    assert abs(pde.ratio_to_u0(sol, -1.0, [1e6])[0] - 1) <= 0.01
    a = pde.ratio_to_u0(sol, -1.0, [10.0, 1e3])
    b = pde.ratio_to_u0(sol, -37.0, [10.0, 1e3])
    assert np.allclose(a, b, rtol=1e-13)


def test_ratio_to_u0_pure_power():
    n = 3
    c, a = leading_coefficient(n), growth_exponent(n)
    knots = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 500)])
    with np.errstate(divide="ignore"):
        sol = PiecewiseSolution.from_function(n, knots, lambda r: c * r**a, lambda r: c * a * r ** (a - 1),
                                              lambda r: c * a * (a - 1) * r ** (a - 2))
    assert np.allclose(pde.ratio_to_u0(sol, -2.0, [1.0, 10.0, 1e4]), 1.0, rtol=1e-13)
