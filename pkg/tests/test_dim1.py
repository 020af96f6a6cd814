import numpy as np
import pytest

from pma_radial import dim1
from pma_radial.errors import InsufficientRange
from pma_radial.solution import PiecewiseSolution

LONG = dim1.solve_dim1(1e8)


def test_initial_values():
    assert LONG(0.0) == 1.0 and LONG(0.0, 1) == 0.0


def test_energy_identity_both_forms():
    assert dim1.energy_residual(LONG) <= 1e-10
    assert dim1.energy_residual(dim1.solve_dim1(1e8, form="second")) <= 1e-9


def test_plug_back():
    assert dim1.plug_back_residual(LONG) <= 1e-8
    r = np.array([1e-4, 1e-3])
    assert np.allclose(LONG.second_derivative_ode(r), 1.0, atol=1e-6)


def test_forms_agree_on_hundred():
    a = dim1.solve_dim1(100.0, form="first")
    b = dim1.solve_dim1(100.0, form="second")
    r = np.linspace(0, 100, 3001)
    assert np.max(np.abs(a(r) / b(r) - 1)) <= 1e-8


def test_log_limit():
    raw, extrap = dim1.log_limit_check(LONG)
    assert abs(raw - 2) <= 0.15 * 2
    assert abs(extrap - 2) <= 0.025 * 2
    assert dim1.approaches_monotonically(LONG, 3)


def test_log_limit_needs_range():
    with pytest.raises(InsufficientRange):
        dim1.log_limit_check(dim1.solve_dim1(1e3))


def test_model_profile_ratio_tends_to_two():
    knots = np.concatenate([[0.0], np.geomspace(10, 1e12, 400)])
    model = PiecewiseSolution.from_function(
        1, knots, lambda r: np.where(r > 0, np.sqrt(2) * r * np.sqrt(np.log(np.maximum(r, 1.0))), 1.0),
        lambda r: np.ones_like(r), lambda r: np.ones_like(r))
    ratio = dim1.log_ratio(model, np.array([1e6, 1e12]))
    assert abs(ratio[1] - 2) < abs(ratio[0] - 2) < 0.3


def test_growth_of_log_excess():
    r = np.geomspace(10, 1e8, 30)
    ex = dim1.log_excess(LONG, r)
    assert np.all(ex > 0) and np.all(np.diff(ex) > 0)
    assert np.all(ex < np.log(r))
    assert np.all(np.diff(LONG.phi_prime) > 0)


def test_tiny_range_is_taylor_only():
    sol = dim1.solve_dim1(5e-3)
    assert sol.r_max == 5e-3


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        dim1.solve_dim1(-1.0)
    with pytest.raises(ValueError):
        dim1.solve_dim1(10.0, form="third")
