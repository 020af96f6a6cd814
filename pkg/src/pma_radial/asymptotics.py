"""Leading and refined asymptotics of a computed profile.

The leading behaviour is phi(r) ~ c_n r^a with a = 2n/(n+1), and likewise
for phi' and phi''.  The correction is studied in s = r^a and tt = ln s
through the deviation Psi(s) = Phi(s) - c_n s, whose linearised dynamics are

    Psi_tt + (n-3)/2 Psi_t + (n-1)/(2n) Psi = 0      (t = tt).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import NamedTuple

import numpy as np
from scipy.optimize import curve_fit

from .constants import (
    characteristic_roots,
    check_dimension,
    growth_exponent,
    leading_coefficient,
    refined_exponent,
)
from .errors import InsufficientRange, RateUndefined, TooFewOscillations
from .solution import PiecewiseSolution

TRANSIENT_RADIUS = 100.0


@dataclass(frozen=True, eq=False)
class RatioTrace:
    n: int
    radii: np.ndarray
    ratio0: np.ndarray
    ratio1: np.ndarray
    ratio2: np.ndarray


def ratio_trace(sol: PiecewiseSolution, samples: int = 256, r_lo: float = 1.0) -> RatioTrace:
    """phi / r^a, phi' / (a r^{a-1}) and phi'' / (a(a-1) r^{a-2}) on a geometric grid.

    phi'' is rebuilt from the ODE rather than by differencing.
    """
    n = check_dimension(sol.n, 2)
    if sol.r_max < 100 * r_lo:
        raise InsufficientRange("ratio trace needs at least two decades of radius")
    a = growth_exponent(n)
    r = np.geomspace(r_lo, sol.r_max, samples)
    phi, dphi = sol(r), sol(r, 1)
    d2phi = sol.second_derivative_ode(r)
    return RatioTrace(
        n=n,
        radii=r,
        ratio0=phi / r**a,
        ratio1=dphi / (a * r ** (a - 1)),
        ratio2=d2phi / (a * (a - 1) * r ** (a - 2)),
    )


def pincer_map(K: float, n: int) -> float:
    """K -> K^{-1/n} ((n+1)/(n-1))^{1/n} (n+1)/(2n); its fixed point is c_n."""
    return K ** (-1 / n) * ((n + 1) / (n - 1)) ** (1 / n) * (n + 1) / (2 * n)


class PincerEstimate(NamedTuple):
    K_bar: float
    K_under: float
    lower_gap: float  # relative shortfall of K_under below P(K_bar), 0 if none
    upper_gap: float  # relative excess of K_bar over P(K_under), 0 if none
    lower_holds: bool
    upper_holds: bool


def pincer_estimate(trace: RatioTrace, tail_fraction: float = 0.25, rtol: float = 1e-9) -> PincerEstimate:
    """Finite-window stand-ins for limsup/liminf of phi / r^a and the two
    pincer inequalities  K_under >= P(K_bar),  K_bar <= P(K_under)."""
    if not 0 < tail_fraction < 1:
        raise ValueError("tail_fraction must lie in (0, 1)")
    k = max(1, int(round(tail_fraction * trace.radii.size)))
    tail = trace.ratio0[-k:]
    K_bar, K_under = float(tail.max()), float(tail.min())
    n = trace.n
    lo_target, hi_target = pincer_map(K_bar, n), pincer_map(K_under, n)
    lower_gap = max(0.0, (lo_target - K_under) / lo_target)
    upper_gap = max(0.0, (K_bar - hi_target) / hi_target)
    return PincerEstimate(K_bar, K_under, lower_gap, upper_gap, lower_gap <= rtol, upper_gap <= rtol)


@dataclass(frozen=True, eq=False)
class DeviationTrace:
    """Psi and its s-derivatives along tt = ln s, with the remainders R1, R2.

    ``dpsi_t`` and ``d2psi_t`` are the tt-derivatives, kept because they do
    not lose accuracy at large s.
    """

    n: int
    t_tilde: np.ndarray
    psi: np.ndarray
    psi_prime: np.ndarray
    psi_second: np.ndarray
    dpsi_t: np.ndarray
    d2psi_t: np.ndarray
    R1: np.ndarray
    R2: np.ndarray

    @property
    def s(self) -> np.ndarray:
        return np.exp(self.t_tilde)

    @property
    def radii(self) -> np.ndarray:
        return np.exp(self.t_tilde / growth_exponent(self.n))


def remainders(n: int, s, psi, dpsi, d2psi):
    """R1, R2 of the linearisation, from Psi, Psi', Psi'' in the s variable.

    R2 = s Psi''/c and
    R1 = (n-1)(Psi Psi'' + c s Psi'')/c^2 + (n-1) Psi/(2 c s)
         + c^{-n} sum_{k>=2} d_{n,k} Psi'^{k-1}.
    """
    c = leading_coefficient(n)
    g = psi * d2psi + c * s * d2psi
    h = (n - 1) / (2 * n) * (psi / s + c)
    tail = np.zeros_like(psi)
    for k in range(2, n + 1):
        d = h * comb(n, k) * c ** (n - k)
        if k <= n - 1:
            d = d + g * comb(n - 1, k) * c ** (n - 1 - k)
        tail = tail + d * dpsi ** (k - 1)
    R1 = g * (n - 1) / c**2 + (n - 1) / 2 * psi / (c * s) + tail / c**n
    R2 = s * d2psi / c
    return R1, R2


def deviation_trace(sol: PiecewiseSolution, r_lo: float = 1.0) -> DeviationTrace:
    """Deviation data for r >= r_lo.

    Uses the solution's integrated deviation tail where available (it starts
    where the integrator entered logarithmic coordinates); otherwise
    forms Psi = phi - c s and its chain-rule derivatives from phi, phi' and
    the ODE value of phi''.
    """
    n = check_dimension(sol.n, 2)
    if sol.r_max < 1e4:
        raise InsufficientRange("deviation analysis needs r_max >= 1e4")
    a = growth_exponent(n)
    c = leading_coefficient(n)
    t_lo = a * math.log(r_lo)
    if sol.tail is not None:
        tl = sol.tail
        keep = tl.t_tilde >= t_lo
        tt, y, v, y2 = tl.t_tilde[keep], tl.psi[keep], tl.dpsi[keep], tl.d2psi[keep]
        s = np.exp(tt)
        psi, dpsi, d2psi = y, v / s, (y2 - v) / s**2
    else:
        r = sol.knots[sol.knots >= max(r_lo, 1e-12)]
        s = r**a
        tt = np.log(s)
        keep = sol.knots >= max(r_lo, 1e-12)
        phi, dphi, d2phi = sol.phi[keep], sol.phi_prime[keep], sol.phi_second[keep]
        drds = 1.0 / (a * r ** (a - 1))
        Phi_s = dphi * drds
        Phi_ss = (d2phi - a * (a - 1) * r ** (a - 2) * Phi_s) * drds**2
        psi, dpsi, d2psi = phi - c * s, Phi_s - c, Phi_ss
        v = s * dpsi
        y2 = s**2 * d2psi + v
    R1, R2 = remainders(n, s, psi, dpsi, d2psi)
    return DeviationTrace(n, tt, psi, dpsi, d2psi, v, y2, R1, R2)


def linearized_residual(dev: DeviationTrace) -> np.ndarray:
    """s^2 Psi'' + ((n-1)/2 + R1) s Psi' + ((n-1)/(2n) + R2) Psi, identically 0."""
    n = dev.n
    return (dev.d2psi_t - dev.dpsi_t) + ((n - 1) / 2 + dev.R1) * dev.dpsi_t + ((n - 1) / (2 * n) + dev.R2) * dev.psi


def deviation_amplitude(dev: DeviationTrace) -> np.ndarray:
    """Envelope of Psi along tt.

    For complex roots sigma +- i omega this is the quadrature amplitude
    sqrt(Psi^2 + ((Psi_t - sigma Psi)/omega)^2), exact for a pure damped mode.
    For real roots it is |Psi|.
    """
    lam = characteristic_roots(dev.n)[0]
    if lam.imag == 0:
        return np.abs(dev.psi)
    sigma, omega = lam.real, abs(lam.imag)
    return np.hypot(dev.psi, (dev.dpsi_t - sigma * dev.psi) / omega)


def ratio_deviation_envelope(dev: DeviationTrace) -> np.ndarray:
    """Envelope of |phi/(c_n r^a) - 1| = |Psi| / (c_n s)."""
    return deviation_amplitude(dev) / (leading_coefficient(dev.n) * dev.s)


def is_non_increasing(values, rtol: float = 0.0) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(v[1:] <= v[:-1] * (1 + rtol)))


def window_from_radii(n: int, r_lo: float, r_hi: float) -> tuple[float, float]:
    a = growth_exponent(n)
    return a * math.log(r_lo), a * math.log(r_hi)


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    frequency: float
    amplitude: float
    fit_residual: float
    window: tuple[float, float]
    method: str

    alpha: float = 1.0  # growth exponent, converts rates in ln s to rates in ln r

    @property
    def radial_exponent(self) -> float:
        """The matching decay rate in r (K_n for the slowest mode)."""
        return -self.exponent * self.alpha


def _zero_crossings(t, y):
    idx = np.nonzero(np.sign(y[1:]) * np.sign(y[:-1]) < 0)[0]
    # linear interpolation between bracketing samples
    return t[idx] - y[idx] * (t[idx + 1] - t[idx]) / (y[idx + 1] - y[idx])


def _envelope_fit(t, y):
    zc = _zero_crossings(t, y)
    if zc.size < 3:
        raise TooFewOscillations(f"{zc.size} zero crossings in the fit window, need 3")
    frequency = math.pi / float(np.mean(np.diff(zc)))
    peaks_t, peaks_v = [], []
    for lo, hi in zip(zc[:-1], zc[1:]):
        sel = np.nonzero((t > lo) & (t < hi))[0]
        if sel.size < 3:
            continue
        j = sel[np.argmax(np.abs(y[sel]))]
        if j in (sel[0], sel[-1]):
            peaks_t.append(t[j])
            peaks_v.append(math.log(abs(y[j])))
            continue
        # parabola through ln|y| at the three samples around the maximum
        f0, f1, f2 = (math.log(abs(y[k])) for k in (j - 1, j, j + 1))
        h = t[j + 1] - t[j]
        denom = f0 - 2 * f1 + f2
        delta = 0.5 * (f0 - f2) / denom if denom != 0 else 0.0
        peaks_t.append(t[j] + delta * h)
        peaks_v.append(f1 - 0.25 * (f0 - f2) * delta)
    if len(peaks_t) < 2:
        raise TooFewOscillations("fewer than two complete lobes in the fit window")
    slope, intercept = np.polyfit(peaks_t, peaks_v, 1)
    return float(slope), frequency


def _linear_prediction(t, y):
    """Two-term linear recurrence on a uniform resampling; returns sigma, omega."""
    tu = np.linspace(t[0], t[-1], min(4000, max(200, t.size)))
    yu = np.interp(tu, t, y)
    h = tu[1] - tu[0]
    A = np.column_stack([yu[1:-1], yu[:-2]])
    (p, q), *_ = np.linalg.lstsq(A, yu[2:], rcond=None)
    z = np.roots([1.0, -p, -q]).astype(complex)
    lam = np.log(z) / h
    lam = lam[np.argmax(lam.real)]
    return lam.real, abs(lam.imag)


def _damped_cosine(t, a, b, sigma, omega):
    return np.exp(sigma * t) * (a * np.cos(omega * t) + b * np.sin(omega * t))


def _model_fit(t, y):
    t0 = t[0]
    tau = t - t0
    sigma0, omega0 = _linear_prediction(t, y)
    scale = float(np.max(np.abs(y)))
    (a, b, sigma, omega), _ = curve_fit(
        _damped_cosine, tau, y / scale, p0=[y[0] / scale, 0.0, sigma0, max(omega0, 1e-3)], maxfev=20000
    )
    model = scale * _damped_cosine(tau, a, b, sigma, omega)
    env = scale * math.hypot(a, b) * np.exp(sigma * tau)
    return float(sigma), float(abs(omega)), float(np.hypot(a, b) * scale), model, env


def decay_fit(dev: DeviationTrace, window: tuple[float, float] | None = None, method: str = "auto") -> DecayFit:
    """Fit the decay of Psi in tt over ``window`` (defaults to r >= 100).

    Real characteristic roots: least-squares slope of ln|Psi|.  Complex roots:
    ``"envelope"`` regresses the peaks of |Psi| and reads the frequency off
    the zero-crossing spacing (needs three crossings); ``"model"`` fits
    e^{sigma t}(a cos wt + b sin wt) by least squares, seeded by linear
    prediction.  ``"auto"`` uses the envelope method when enough crossings
    are present.
    """
    n = dev.n
    if n < 4:
        raise RateUndefined("no decay rate is available for n = 2, 3")
    a = growth_exponent(n)
    if window is None:
        window = (a * math.log(TRANSIENT_RADIUS), float(dev.t_tilde[-1]))
    lo, hi = window
    sel = (dev.t_tilde >= lo) & (dev.t_tilde <= hi)
    t, y = dev.t_tilde[sel], dev.psi[sel]
    if t.size < 16 or t[-1] - t[0] < 3.0:
        raise InsufficientRange("fit window must span at least 3 units of ln s")
    lam = characteristic_roots(n)[0]
    if lam.imag == 0:
        if np.any(np.sign(y) != np.sign(y[0])):
            raise ValueError("deviation changes sign inside the fit window")
        slope, intercept = np.polyfit(t, np.log(np.abs(y)), 1)
        model = np.sign(y[0]) * np.exp(intercept + slope * t)
        env = np.abs(model)
        fit = DecayFit(float(slope), 0.0, float(env[0]), float(np.sqrt(np.mean(((y - model) / env) ** 2))),
                       (float(lo), float(hi)), "log-linear", a)
        return fit
    if method == "auto":
        method = "envelope" if _zero_crossings(t, y).size >= 3 else "model"
    if method == "envelope":
        slope, freq = _envelope_fit(t, y)
        # residual of the pure mode with these parameters, phase/amplitude by least squares
        tau = t - t[0]
        basis = np.column_stack([np.exp(slope * tau) * np.cos(freq * tau), np.exp(slope * tau) * np.sin(freq * tau)])
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        model = basis @ coef
        amp = float(np.hypot(*coef))
        env = amp * np.exp(slope * tau)
        return DecayFit(slope, freq, amp, float(np.sqrt(np.mean(((y - model) / env) ** 2))),
                        (float(lo), float(hi)), "envelope", a)
    if method == "model":
        sigma, omega, amp, model, env = _model_fit(t, y)
        return DecayFit(sigma, omega, amp, float(np.sqrt(np.mean(((y - model) / env) ** 2))),
                        (float(lo), float(hi)), "model", a)
    raise ValueError(f"unknown fit method {method!r}")


def refined_error_profile(sol: PiecewiseSolution, r_lo: float = TRANSIENT_RADIUS):
    """(r, |phi(r) - c_n r^a| r^{K_n}) over r >= r_lo."""
    n = sol.n
    if n < 4:
        raise RateUndefined("K_n is only defined for n >= 4")
    K = refined_exponent(n)
    dev = deviation_trace(sol, r_lo)
    r = dev.radii
    return r, np.abs(dev.psi) * r**K


def refined_error_check(sol: PiecewiseSolution, r_lo: float = TRANSIENT_RADIUS) -> float:
    """sup over r >= r_lo of |phi(r) - c_n r^a| r^{K_n}: the O-constant of the refined expansion."""
    _, q = refined_error_profile(sol, r_lo)
    return float(np.max(q))


def asymptotics_report(sol: PiecewiseSolution, window_radii: tuple[float, float] | None = None) -> dict:
    n = sol.n
    c = leading_coefficient(n)
    a = growth_exponent(n)
    lam = characteristic_roots(n)[0]
    report = {
        "n": n,
        "c_n": c,
        "ratio_at_rmax": float(sol(sol.r_max) / sol.r_max**a),
        "fitted_exponent": None,
        "fitted_frequency": None,
        "expected_exponent": lam.real if n >= 4 else None,
        "expected_frequency": abs(lam.imag) if n >= 4 else None,
        "fit_residual": None,
    }
    if n >= 4 and sol.r_max >= 1e4:
        window = None if window_radii is None else window_from_radii(n, *window_radii)
        fit = decay_fit(deviation_trace(sol), window)
        report.update(
            fitted_exponent=fit.exponent,
            fitted_frequency=fit.frequency,
            fit_residual=fit.fit_residual,
            fit_method=fit.method,
            fitted_K=fit.radial_exponent,
            expected_K=refined_exponent(n),
        )
    return report
