"""Three independent constructions of the radial profile phi.

phi solves  phi (phi')^{n-1} phi'' = r^{n-1},  phi(0) = 1, phi'(0) = 0,
equivalently  phi' = F(r, phi) = (n int_0^r s^{n-1}/phi ds)^{1/n}.

* :func:`euler_break_line` freezes F at the left end of each mesh interval.
* :func:`picard_refine` applies the integral map phi -> 1 + int_0^r F(s, phi) ds.
* :func:`integrate_reference` runs an embedded Runge-Kutta pair, first in r and
  then in the logarithmic variable ln s, s = r^{2n/(n+1)}, where it tracks the
  deviation from c_n s directly.

:func:`cross_validate` checks two of them against each other with a
Gronwall-type amplification bound.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .constants import check_dimension, growth_exponent, leading_coefficient
from .errors import CertificationFailure, CoverageMismatch, StepSizeUnderflow
from .quadrature import (
    GL_NODES,
    GL_WEIGHTS,
    QuadratureAccumulator,
    functional_at_nodes,
    integral_form_residual,
)
from .solution import DeviationTail, PiecewiseSolution, SolveConfig, ode_second_derivative

log = logging.getLogger(__name__)

# knot density of the reference solution: per unit r below r_log, per unit ln s above
KNOTS_PER_UNIT_R = 400
KNOTS_PER_UNIT_LOG = 400
TAYLOR_KNOTS = 9
CERTIFY_RADIUS = 10.0


def taylor_start(n: int, r):
    """Series of phi about the axis: 1 + r^2/2 - r^4/(8(n+2)) + a6 r^6.

    Returns ``(phi, phi_prime)``.  The r^6 coefficient is
    (n^2 + 6n + 14) / (48 (n+2)^2 (n+4)), so the truncation error is O(r^8).
    """
    n = check_dimension(n)
    r = np.asarray(r, dtype=float)
    a4 = -1.0 / (8 * (n + 2))
    a6 = (n * n + 6 * n + 14) / (48 * (n + 2) ** 2 * (n + 4))
    r2 = r * r
    phi = 1.0 + r2 * (0.5 + r2 * (a4 + a6 * r2))
    dphi = r * (1.0 + r2 * (4 * a4 + 6 * a6 * r2))
    return phi, dphi


def euler_break_line(cfg: SolveConfig) -> PiecewiseSolution:
    """Euler polygon on [0, r_max] with m_euler uniform segments.

    On each segment the slope is F(r_{i-1}, psi).  The sup of
    |psi' - F(r, psi)| over segment i is F(r_i) - F(r_{i-1}) because F is
    non-decreasing in r; these are stored in ``segment_defects``.
    """
    n, m = cfg.n, cfg.m_euler
    knots = np.linspace(0.0, cfg.r_max, m + 1)
    h = cfg.r_max / m
    x = GL_NODES * h
    w = GL_WEIGHTS * h
    psi = np.empty(m + 1)
    slope = np.empty(m + 1)
    psi[0], slope[0] = 1.0, 0.0
    acc = QuadratureAccumulator(n)
    prefix = 0.0
    for i in range(1, m + 1):
        r0 = knots[i - 1]
        # psi is linear on the segment, so the rule is applied to the exact integrand
        s = r0 + x
        seg = float(np.dot(w, s ** (n - 1) / (psi[i - 1] + slope[i - 1] * x)))
        prefix += seg
        acc.extend(knots[i], seg)
        psi[i] = psi[i - 1] + slope[i - 1] * h
        slope[i] = (n * prefix) ** (1.0 / n)
    defects = np.diff(slope)
    return PiecewiseSolution(
        knots=knots,
        phi=psi,
        phi_prime=slope,
        n=n,
        method_tag="euler",
        defect=float(np.sum(h * defects)),
        defect_radius=cfg.r_max,
        segment_defects=defects,
        meta={"m": m, "step": h},
    )


def lipschitz_constant(n: int, upper: float, lower: float = 1.0) -> float:
    """C with |F(r, a) - F(r, b)| <= C r sup|a - b| for lower <= a, b <= upper."""
    return upper ** (1.0 - 1.0 / n) / (n * lower**2)


def picard_refine(sol: PiecewiseSolution) -> PiecewiseSolution:
    """One Picard step psi -> 1 + int_0^r F(s, psi) ds on the same knots."""
    n = sol.n
    acc = QuadratureAccumulator.from_solution(sol)
    _, F_nodes = functional_at_nodes(sol, acc)
    h = np.diff(sol.knots)
    seg = h * (F_nodes * GL_WEIGHTS).sum(axis=1)
    phi_new = 1.0 + np.concatenate([[0.0], np.cumsum(seg)])
    F = (n * acc.prefix) ** (1.0 / n)
    r = sol.knots
    with np.errstate(divide="ignore", invalid="ignore"):
        dF = np.where(r > 0, (r / F) ** (n - 1) / sol.phi, sol.phi[0] ** (-1.0 / n))
    R = sol.r_max
    upper = max(1.0 + 0.5 * R * R, phi_new.max(), sol.phi.max())
    lower = min(1.0, phi_new.min(), sol.phi.min())
    C = lipschitz_constant(n, upper, lower)
    change = float(np.max(np.abs(phi_new - sol.phi)))
    return PiecewiseSolution(
        knots=sol.knots,
        phi=phi_new,
        phi_prime=F,
        n=n,
        method_tag="picard",
        phi_second=dF,
        defect=0.5 * C * R * R * change + float(acc.errors[-1]),
        defect_radius=R,
        meta={"picard_change": change},
    )


def constant_profile(n: int, knots) -> PiecewiseSolution:
    """phi = 1, the starting point of the antitone Picard bracket."""
    knots = np.asarray(knots, dtype=float)
    return PiecewiseSolution(
        knots=knots,
        phi=np.ones_like(knots),
        phi_prime=np.zeros_like(knots),
        n=n,
        method_tag="picard",
        phi_second=np.zeros_like(knots),
    )


def picard_iterates(sol: PiecewiseSolution, count: int) -> list[PiecewiseSolution]:
    out = [sol]
    for _ in range(count):
        out.append(picard_refine(out[-1]))
    return out


def picard_limit(sol: PiecewiseSolution, tol: float = 1e-10, max_iter: int = 500) -> PiecewiseSolution:
    """Iterate :func:`picard_refine` until successive iterates differ by <= tol (relative)."""
    cur = sol
    for k in range(1, max_iter + 1):
        cur = picard_refine(cur)
        if cur.meta["picard_change"] <= tol * float(np.max(cur.phi)):
            cur.meta["picard_iterations"] = k
            return cur
    raise CertificationFailure(f"Picard iteration did not settle in {max_iter} steps")


def _check_ivp(res, phase):
    if res.status == -1 or not res.success:
        raise StepSizeUnderflow(f"{phase}: {res.message}")


def _deviation_rhs(n: int, c: float):
    """Right-hand side for (Psi, dPsi/dtt) in tt = ln s.

    Exact rewrite of Phi (Phi')^{n-1} Phi'' + (n-1)/(2n) Phi (Phi')^n / s
    = ((n+1)/(2n))^{n+1} with Phi = c s + Psi.  The bracket
    (1 + a)(1 + b)^n - 1 is formed with log1p/expm1 to avoid cancellation.
    """
    q = (n - 1) / (2 * n) * c

    def rhs(t, y):
        s = math.exp(t)
        a = y[0] / (c * s)
        b = y[1] / (c * s)
        E = math.expm1(math.log1p(a) + n * math.log1p(b))
        return [y[1], y[1] - q * s * E / ((1.0 + a) * (1.0 + b) ** (n - 1))]

    return rhs


def _grid(a: float, b: float, per_unit: int) -> np.ndarray:
    return np.linspace(a, b, max(2, int(math.ceil((b - a) * per_unit)) + 1))


def integrate_reference(cfg: SolveConfig) -> PiecewiseSolution:
    """High-order two-phase integration of the radial ODE on [0, r_max].

    Taylor series up to r_switch, DOP853 in r up to r_log, then DOP853 on the
    deviation Psi in tt = ln s up to r_max.  Knots are laid out on uniform
    grids (in r, then in tt) and filled from the dense output.
    """
    n = cfg.n
    rtol = cfg.tol / 100
    r_end = cfg.r_max
    r_sw = min(cfg.r_switch, r_end)

    r_t = np.linspace(0.0, r_sw, TAYLOR_KNOTS)
    phi_t, dphi_t = taylor_start(n, r_t)
    knots, phi, dphi = [r_t], [phi_t], [dphi_t]
    tail = None
    meta = {"phase_a_steps": 0, "phase_b_steps": 0}

    if r_end > r_sw:
        r_a_end = min(cfg.r_log, r_end)

        def rhs_a(r, y):
            return [y[1], (r / y[1]) ** (n - 1) / y[0]]

        res = solve_ivp(
            rhs_a, (r_sw, r_a_end), [phi_t[-1], dphi_t[-1]],
            method="DOP853", rtol=rtol, atol=rtol * 1e-3, dense_output=True,
        )
        _check_ivp(res, "phase A")
        meta["phase_a_steps"] = res.t.size - 1
        r_a = _grid(r_sw, r_a_end, KNOTS_PER_UNIT_R)[1:]
        y_a = res.sol(r_a)
        y_a[:, -1] = res.y[:, -1]
        knots.append(r_a)
        phi.append(y_a[0])
        dphi.append(y_a[1])

        if r_end > r_a_end and n >= 2:
            alpha = growth_exponent(n)
            c = leading_coefficient(n)
            r0 = r_a_end
            s0 = r0**alpha
            p0, dp0 = res.y[:, -1]
            y0 = [p0 - c * s0, r0 * dp0 / alpha - c * s0]
            t0, t1 = math.log(s0), alpha * math.log(r_end)
            rhs_b = _deviation_rhs(n, c)
            res_b = solve_ivp(
                rhs_b, (t0, t1), y0, method="DOP853", rtol=rtol, atol=1e-30, dense_output=True,
            )
            _check_ivp(res_b, "phase B")
            meta["phase_b_steps"] = res_b.t.size - 1
            tt = _grid(t0, t1, KNOTS_PER_UNIT_LOG)
            yb = res_b.sol(tt)
            yb[:, 0] = y0
            yb[:, -1] = res_b.y[:, -1]
            d2 = np.array([rhs_b(t, yy)[1] for t, yy in zip(tt, yb.T)])
            tail = DeviationTail(t_tilde=tt, psi=yb[0], dpsi=yb[1], d2psi=d2)
            s = np.exp(tt)
            r_b = np.exp(tt / alpha)
            r_b[0], r_b[-1] = r0, r_end
            knots.append(r_b[1:])
            phi.append((c * s + yb[0])[1:])
            dphi.append((alpha / r_b * (c * s + yb[1]))[1:])
        elif r_end > r_a_end:
            raise ValueError("the logarithmic phase needs n >= 2")

    knots = np.concatenate(knots)
    phi = np.concatenate(phi)
    dphi = np.concatenate(dphi)
    sol = PiecewiseSolution(
        knots=knots,
        phi=phi,
        phi_prime=dphi,
        n=n,
        method_tag="reference",
        phi_second=ode_second_derivative(knots, phi, dphi, n),
        tail=tail,
        meta=meta,
    )
    radius = min(r_end, CERTIFY_RADIUS)
    return sol.replace(defect=integral_form_residual(sol, radius), defect_radius=radius)


@dataclass(frozen=True)
class GronwallCertificate:
    """Consistency of two approximate solutions with their claimed defects.

    If a and b satisfy the integral equation up to defects eps_a, eps_b on
    [0, R] and both stay in [lower, upper], then
    sup |a - b| <= (eps_a + eps_b) exp(C R^2) with C from
    :func:`lipschitz_constant`.
    """

    R: float
    sup_distance: float
    growth_constant: float
    defect_a: float
    defect_b: float
    bound: float
    admissible: bool

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _claimed_defect(sol: PiecewiseSolution, R: float) -> float:
    if sol.defect is not None and sol.defect_radius >= R:
        return float(sol.defect)
    return integral_form_residual(sol, R)


def cross_validate(a: PiecewiseSolution, b: PiecewiseSolution, R: float) -> GronwallCertificate:
    """Compare two solutions on [0, R] against the Gronwall envelope."""
    for name, sol in (("a", a), ("b", b)):
        if sol.r_max < R * (1 - 1e-14):
            raise CoverageMismatch(f"solution {name} ends at {sol.r_max:.6g} < R = {R:.6g}")
    grid = np.unique(np.concatenate([
        np.linspace(0.0, R, 2001),
        a.knots[a.knots <= R],
        b.knots[b.knots <= R],
    ]))
    va, vb = a(grid), b(grid)
    dist = float(np.max(np.abs(va - vb)))
    upper = max(1.0 + 0.5 * R * R, va.max(), vb.max())
    lower = min(1.0, va.min(), vb.min())
    C = lipschitz_constant(a.n, upper, lower)
    eps_a, eps_b = _claimed_defect(a, R), _claimed_defect(b, R)
    total = eps_a + eps_b
    if total == 0.0:
        bound = 0.0
    else:
        exponent = C * R * R
        bound = total * math.exp(exponent) if exponent < 700 else math.inf
    # 1e-14 relative slack absorbs rounding in the sampled distance itself
    admissible = dist <= bound + 1e-14 * max(1.0, float(np.max(np.abs(va))))
    return GronwallCertificate(R, dist, C, eps_a, eps_b, bound, bool(admissible))


def apriori_bounds_check(sol: PiecewiseSolution, rtol: float = 0.0) -> bool:
    """1 <= phi <= 1 + r^2/2 and 0 <= phi' <= r at every knot."""
    r = sol.knots
    ok_phi = np.all(sol.phi >= 1.0 - rtol) and np.all(sol.phi <= (1.0 + 0.5 * r * r) * (1 + rtol))
    ok_dphi = np.all(sol.phi_prime >= -rtol * r) and np.all(sol.phi_prime <= r * (1 + rtol))
    return bool(ok_phi and ok_dphi)


def solve(cfg: SolveConfig) -> PiecewiseSolution:
    """Reference solution, certified against a Picard-refined break line.

    The comparison runs on [0, min(r_max, 10)]; a certificate that is not
    admissible raises :class:`CertificationFailure`.
    """
    ref = integrate_reference(cfg)
    R = min(cfg.r_max, CERTIFY_RADIUS)
    euler = euler_break_line(dataclasses.replace(cfg, r_max=R))
    limit = picard_limit(euler, tol=cfg.tol)
    cert = cross_validate(ref, limit, R)
    log.debug("n=%d certificate %s", cfg.n, cert)
    if not cert.admissible:
        raise CertificationFailure(
            f"reference and Picard solutions differ by {cert.sup_distance:.3e} "
            f"> envelope {cert.bound:.3e} on [0, {R:g}]"
        )
    meta = dict(ref.meta)
    meta["picard_iterations"] = limit.meta.get("picard_iterations")
    meta["picard_distance"] = cert.sup_distance
    return ref.replace(certificate=cert, meta=meta)
