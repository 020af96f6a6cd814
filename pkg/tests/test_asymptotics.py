import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pma_radial import asymptotics as A
from pma_radial.constants import characteristic_roots, growth_exponent, leading_coefficient, refined_exponent
from pma_radial.errors import InsufficientRange, RateUndefined, TooFewOscillations
from pma_radial.solution import PiecewiseSolution


def synthetic_trace(n, psi_fn, t0=0.0, t1=25.0, count=6000):
    """A DeviationTrace for a prescribed Psi(tt); derivatives by differentiation of the closure."""
    t = np.linspace(t0, t1, count)
    h = 1e-5
    y = psi_fn(t)
    v = (psi_fn(t + h) - psi_fn(t - h)) / (2 * h)
    y2 = (psi_fn(t + h) - 2 * y + psi_fn(t - h)) / h**2
    z = np.zeros_like(t)
    return A.DeviationTrace(n, t, y, z, z, v, y2, z, z)


# ---- leading ratios


def test_ratios_n4_within_one_percent(ref):
    tr = A.ratio_trace(ref(4, 1e6))
    c = leading_coefficient(4)
    for ratio in (tr.ratio0, tr.ratio1, tr.ratio2):
        assert abs(ratio[-1] / c - 1) <= 0.01


def test_ratio_trace_needs_two_decades(ref):
    with pytest.raises(InsufficientRange):
        A.ratio_trace(ref(2, 10.0), r_lo=1.0)


@pytest.mark.parametrize("n", range(2, 9))
def test_ratio_deviation_envelopes_non_increasing(ref, n):
    sol = ref(n, 1e6)
    dev = A.deviation_trace(sol, 1e4)
    a = growth_exponent(n)
    lam = characteristic_roots(n)[0]
    if lam.imag != 0:
        # all three ratio deviations are linear in (Psi, Psi_t, Psi_tt) / s, so each
        # envelope is a fixed multiple of the quadrature amplitude over s
        env = A.deviation_amplitude(dev) / dev.s
        assert A.is_non_increasing(env, 1e-9)
    else:
        dev0 = dev.psi / dev.s
        dev1 = dev.dpsi_t / dev.s
        dev2 = (dev.dpsi_t + a / (a - 1) * (dev.d2psi_t - dev.dpsi_t)) / dev.s
        for d in (dev0, dev1, dev2):
            assert A.is_non_increasing(np.abs(d), 1e-9)


# ---- pincer


def test_pincer_constant_trace():
    n = 5
    c = leading_coefficient(n)
    r = np.geomspace(1, 1e6, 50)
    tr = A.RatioTrace(n, r, np.full(50, c), np.full(50, c), np.full(50, c))
    est = A.pincer_estimate(tr)
    assert est.K_bar == est.K_under == c
    assert est.lower_holds and est.upper_holds
    assert A.pincer_map(c, n) == pytest.approx(c, rel=1e-15)


@given(st.integers(2, 12), st.floats(1.01, 50.0))
def test_pincer_map_twice_contracts_like_n_squared(n, factor):
    c = leading_coefficient(n)
    K = c * factor
    K2 = A.pincer_map(A.pincer_map(K, n), n)
    assert K2 > c
    assert math.log(K2 / c) == pytest.approx(math.log(K / c) / n**2, rel=1e-12)


def test_pincer_spread_n3(ref):
    est = A.pincer_estimate(A.ratio_trace(ref(3, 1e6), r_lo=1e4, samples=400), tail_fraction=0.999)
    assert est.K_bar - est.K_under <= 0.02 * leading_coefficient(3)


@pytest.mark.parametrize("n", [4, 5, 6, 8])
def test_pincer_inequalities_hold(ref, n):
    est = A.pincer_estimate(A.ratio_trace(ref(n, 1e6)), rtol=1e-9)
    assert est.lower_holds and est.upper_holds


@pytest.mark.parametrize("n", [2, 3])
def test_pincer_gap_bounded_by_window_spread(ref, n):
    # a finite window cannot see the limits; the shortfall is below the oscillation it contains
    est = A.pincer_estimate(A.ratio_trace(ref(n, 1e6)))
    spread = (est.K_bar - est.K_under) / est.K_under
    assert est.lower_gap <= spread and est.upper_gap <= spread


# ---- deviation trace


@pytest.mark.parametrize("n", [2, 4, 6])
def test_linearized_residual_vanishes(ref, n):
    dev = A.deviation_trace(ref(n, 1e6))
    res = A.linearized_residual(dev)
    assert np.max(np.abs(res)) <= 1e-12 * np.max(np.abs(dev.psi))


def test_remainders_vanish_for_pure_power_law():
    s = np.geomspace(1, 1e4, 20)
    z = np.zeros_like(s)
    R1, R2 = A.remainders(4, s, z, z, z)
    assert np.all(R1 == 0) and np.all(R2 == 0)


def test_deviation_chain_rule_fallback_agrees(ref):
    sol = ref(5, 1e4)
    from_tail = A.deviation_trace(sol, 100.0)
    fallback = A.deviation_trace(sol.replace(tail=None), 100.0)
    # same knots in the log phase; compare Psi where it is above the cancellation floor
    psi_f = np.interp(from_tail.t_tilde, fallback.t_tilde, fallback.psi)
    scale = np.max(np.abs(from_tail.psi))
    assert np.max(np.abs(psi_f - from_tail.psi)) <= 1e-6 * scale


@pytest.mark.parametrize("n", [4, 6])
def test_deviation_derivative_consistency(ref, n):
    dev = A.deviation_trace(ref(n, 1e6), 100.0)
    numeric = np.gradient(dev.psi, dev.t_tilde)
    lam = characteristic_roots(n)[0]
    floor = A.deviation_amplitude(dev) * abs(lam)  # local size of Psi_t
    interior = slice(2, -2)
    assert np.max(np.abs(numeric - dev.dpsi_t)[interior] / floor[interior]) <= 1e-5


def test_deviation_trace_needs_range(ref):
    with pytest.raises(InsufficientRange):
        A.deviation_trace(ref(4, 10.0))


# ---- decay fits


@pytest.mark.parametrize(
    "n, sigma, omega",
    [(4, -0.25, 0.5590169943749475), (5, -0.5, 0.3872983346207417), (6, -0.36811869208701337, 0.0),
     (8, -0.18933982822017875, 0.0)],
)
def test_decay_fit_matches_roots(ref, n, sigma, omega):
    dev = A.deviation_trace(ref(n, 1e6))
    fit = A.decay_fit(dev, A.window_from_radii(n, 1e3, 1e6))
    assert fit.exponent == pytest.approx(sigma, abs=1e-3)
    assert fit.frequency == pytest.approx(omega, abs=1e-3)
    assert fit.radial_exponent == pytest.approx(refined_exponent(n), abs=2e-3)
    # K_n and the s-rate are tied by the change of variables
    assert fit.radial_exponent == pytest.approx(-growth_exponent(n) * fit.exponent, rel=1e-15)


def test_decay_fit_envelope_on_long_window(ref):
    dev = A.deviation_trace(ref(4, 1e6))
    fit = A.decay_fit(dev, method="envelope")
    assert fit.method == "envelope"
    assert fit.exponent == pytest.approx(-0.25, abs=0.01)
    assert fit.frequency == pytest.approx(0.559, abs=0.01)


def test_envelope_needs_three_crossings(ref):
    dev = A.deviation_trace(ref(5, 1e6))
    with pytest.raises(TooFewOscillations):
        A.decay_fit(dev, A.window_from_radii(5, 1e3, 1e6), method="envelope")


@pytest.mark.parametrize("n", [2, 3])
def test_no_rate_below_four(ref, n):
    with pytest.raises(RateUndefined):
        A.decay_fit(A.deviation_trace(ref(n, 1e4)))


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.8, -0.05), st.floats(0.6, 2.0), st.floats(0, 2 * math.pi), st.sampled_from(["model", "envelope"]))
def test_synthetic_damped_mode_recovered(sigma, omega, theta, method):
    dev = synthetic_trace(4, lambda t: np.exp(sigma * t) * np.cos(omega * t + theta), t1=25.0)
    fit = A.decay_fit(dev, (2.0, 25.0), method=method)
    assert fit.exponent == pytest.approx(sigma, abs=2e-3)
    assert fit.frequency == pytest.approx(omega, abs=2e-2)


def test_synthetic_real_mode_recovered():
    dev = synthetic_trace(6, lambda t: 3.0 * np.exp(-0.4 * t))
    fit = A.decay_fit(dev, (1.0, 20.0))
    assert fit.exponent == pytest.approx(-0.4, abs=1e-12) and fit.frequency == 0.0


def test_unknown_method_rejected(ref):
    with pytest.raises(ValueError):
        A.decay_fit(A.deviation_trace(ref(4, 1e6)), method="magic")


# ---- refined error


def test_refined_error_zero_for_pure_power():
    n = 4
    c, a = leading_coefficient(n), growth_exponent(n)
    knots = np.concatenate([[0.0], np.geomspace(1e-3, 1e5, 2000)])
    with np.errstate(divide="ignore"):
        sol = PiecewiseSolution.from_function(n, knots, lambda r: c * r**a, lambda r: c * a * r ** (a - 1),
                                              lambda r: c * a * (a - 1) * r ** (a - 2))
    assert A.refined_error_check(sol) == pytest.approx(0.0, abs=1e-9)


def test_refined_error_envelope_flat_last_decade(ref):
    sol = ref(4, 1e6)
    dev = A.deviation_trace(sol, 1e5)
    q_env = A.deviation_amplitude(dev) * dev.radii ** refined_exponent(4)
    assert A.is_non_increasing(q_env, 1e-9)
    assert np.isfinite(A.refined_error_check(sol))


def test_refined_error_undefined_below_four(ref):
    with pytest.raises(RateUndefined):
        A.refined_error_check(ref(3, 1e4))


def test_asymptotics_report_keys(ref):
    rep = A.asymptotics_report(ref(6, 1e6))
    for key in ("c_n", "ratio_at_rmax", "fitted_exponent", "fitted_frequency", "expected_exponent",
                "expected_frequency", "fit_residual"):
        assert key in rep
