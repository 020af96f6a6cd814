"""The one-dimensional profile: phi phi'' = 1, phi(0) = 1, phi'(0) = 0.

Multiplying by phi'/phi and integrating gives the first integral
(phi')^2 = 2 ln phi, i.e. the first-order form phi' = sqrt(2 ln phi).
Growth is only r sqrt(2 ln r), so phi^2 / (r^2 ln phi) -> 2 slowly.
"""
from __future__ import annotations

import math
from typing import Literal

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InsufficientRange, StepSizeUnderflow
from .radial import KNOTS_PER_UNIT_LOG, TAYLOR_KNOTS, taylor_start
from .solution import PiecewiseSolution

R_SWITCH = 1e-2


def _rhs_second(x, y):
    # y = (ln phi, phi') in x = ln r
    q = math.exp(x - y[0])
    return [q * y[1], q]


def _rhs_first(x, y):
    return [math.exp(x - y[0]) * math.sqrt(2.0 * max(y[0], 0.0))]


def solve_dim1(
    r_max: float,
    tol: float = 1e-10,
    form: Literal["first", "second"] = "first",
    r_switch: float = R_SWITCH,
) -> PiecewiseSolution:
    """Taylor series up to ``r_switch``, then DOP853 in (ln r, ln phi).

    ``form="first"`` integrates phi' = sqrt(2 ln phi); ``form="second"``
    integrates phi'' = 1/phi as a system.  Working in logarithms keeps the
    step count proportional to the number of decades covered.
    """
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    if form not in ("first", "second"):
        raise ValueError(f"unknown form {form!r}")
    r_head = np.linspace(0.0, min(r_switch, r_max), TAYLOR_KNOTS)
    phi_h, dphi_h = taylor_start(1, r_head)
    if r_max <= r_switch:
        return PiecewiseSolution(r_head, phi_h, dphi_h, n=1, method_tag="reference", meta={"form": form})

    x0, x1 = math.log(r_switch), math.log(r_max)
    u0 = math.log(phi_h[-1])
    rtol = tol / 100
    if form == "second":
        y0, rhs = [u0, dphi_h[-1]], _rhs_second
    else:
        y0, rhs = [u0], _rhs_first
    res = solve_ivp(rhs, (x0, x1), y0, method="DOP853", rtol=rtol, atol=1e-30, dense_output=True)
    if not res.success:
        raise StepSizeUnderflow(f"one-dimensional integration stopped: {res.message}")
    count = max(2, int(math.ceil((x1 - x0) * KNOTS_PER_UNIT_LOG)) + 1)
    x = np.linspace(x0, x1, count)[1:]
    y = res.sol(x)
    u = y[0]
    dphi = y[1] if form == "second" else np.sqrt(2.0 * u)
    r = np.exp(x)
    r[-1] = r_max
    knots = np.concatenate([r_head, r])
    phi = np.concatenate([phi_h, np.exp(u)])
    dphi = np.concatenate([dphi_h, dphi])
    return PiecewiseSolution(knots, phi, dphi, n=1, method_tag="reference", meta={"form": form, "nfev": int(res.nfev)})


def energy_residual(sol: PiecewiseSolution) -> float:
    """max over knots of |(phi')^2 - 2 ln phi|."""
    return float(np.max(np.abs(sol.phi_prime**2 - 2.0 * np.log(sol.phi))))


def plug_back_residual(sol: PiecewiseSolution, r_lo: float = R_SWITCH) -> float:
    """max |phi phi'' - 1| at interval midpoints, phi'' from the interpolated phi'."""
    k = sol.knots
    mid = 0.5 * (k[1:] + k[:-1])
    mid = mid[mid >= r_lo]
    return float(np.max(np.abs(sol(mid) * sol(mid, 2) - 1.0)))


def log_ratio(sol: PiecewiseSolution, r):
    """phi^2 / (r^2 ln phi), which tends to 2."""
    r = np.asarray(r, dtype=float)
    phi = sol(r)
    return phi**2 / (r**2 * np.log(phi))


def log_limit_check(sol: PiecewiseSolution, samples: int = 200) -> tuple[float, float]:
    """(ratio at r_max, limit extrapolated by fitting L + a/ln r over the last two decades).

    The 1/ln r correction model is a numerical choice motivated by the
    1/ln phi size of the error term; only the limit itself is known.
    """
    if sol.r_max < 1e6:
        raise InsufficientRange("the logarithmic limit needs r_max >= 1e6")
    r = np.geomspace(sol.r_max / 100, sol.r_max, samples)
    ratio = log_ratio(sol, r)
    a, L = np.polyfit(1.0 / np.log(r), ratio, 1)
    return float(ratio[-1]), float(L)


def approaches_monotonically(sol: PiecewiseSolution, decades: float = 3.0, samples: int = 300, limit: float = 2.0) -> bool:
    """|ratio - limit| is non-increasing over the final ``decades`` decades."""
    r = np.geomspace(sol.r_max / 10**decades, sol.r_max, samples)
    gap = np.abs(log_ratio(sol, r) - limit)
    return bool(np.all(np.diff(gap) <= 0))


def log_excess(sol: PiecewiseSolution, r):
    """ln phi - ln r, positive and growing like (1/2) ln ln r."""
    r = np.asarray(r, dtype=float)
    return np.log(sol(r)) - np.log(r)


def dim1_report(sol: PiecewiseSolution) -> dict:
    raw, extrap = log_limit_check(sol)
    return {
        "ratio_at_rmax": raw,
        "extrapolated_limit": extrap,
        "extrapolation_model": "L + a/ln r",
        "energy_residual_max": energy_residual(sol),
        "monotone_approach": approaches_monotonically(sol),
    }
