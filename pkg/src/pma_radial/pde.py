"""The space-time solution u(x, t) = w(t) phi(|x|) of -u_t det D^2 u = 1.

For radial u the Hessian has eigenvalue u_rr once and u_r/r with
multiplicity n-1, so det D^2 u = u_rr (u_r/r)^{n-1}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import check_dimension, time_factor, u0_reference
from .errors import CoverageMismatch
from .solution import PiecewiseSolution


@dataclass(frozen=True, eq=False)
class SpaceTimeGrid:
    radii: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        t = np.asarray(self.times, dtype=float)
        if r.ndim != 1 or t.ndim != 1 or r.size == 0 or t.size == 0:
            raise ValueError("radii and times must be non-empty 1-d sequences")
        if np.any(r <= 0):
            raise ValueError("radii must be strictly positive")
        if np.any(t >= 0):
            raise ValueError("times must be strictly negative")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "times", t)

    @classmethod
    def geometric(cls, r_min=0.1, r_max=1e3, t_min=-10.0, t_max=-0.01, nr=64, nt=32) -> "SpaceTimeGrid":
        """nr geometric radii in [r_min, r_max] times nt geometric times in [t_min, t_max]."""
        if not t_min < t_max < 0:
            raise ValueError("need t_min < t_max < 0")
        times = -np.geomspace(-t_min, -t_max, nt)
        return cls(np.geomspace(r_min, r_max, nr), times)

    @property
    def samples(self) -> int:
        return self.radii.size * self.times.size


def _time_factors(times, w0, n):
    pairs = np.array([time_factor(float(t), w0, n) for t in times])
    return pairs[:, 0], pairs[:, 1]


def radial_pde_residual(u_t, u_r, u_rr, r, n: int):
    """-u_t u_rr (u_r/r)^{n-1} - 1 (arrays broadcast)."""
    return -u_t * u_rr * (u_r / r) ** (n - 1) - 1.0


@dataclass
class ResidualReport:
    max_abs_residual: float
    at_r: float
    at_t: float
    samples: int
    time_factor_defect: float  # max |-w' w^n - 1|
    profile_defect: float  # max |phi phi'' (phi'/r)^{n-1} - 1|

    def to_dict(self) -> dict:
        return {
            "max_abs_residual": self.max_abs_residual,
            "at_r": self.at_r,
            "at_t": self.at_t,
            "samples": self.samples,
            "time_factor_defect": self.time_factor_defect,
            "profile_defect": self.profile_defect,
        }


def _report(res, grid, time_defect, profile_defect) -> ResidualReport:
    i, j = np.unravel_index(np.argmax(np.abs(res)), res.shape)
    return ResidualReport(
        max_abs_residual=float(np.abs(res[i, j])),
        at_r=float(grid.radii[j]),
        at_t=float(grid.times[i]),
        samples=int(res.size),
        time_factor_defect=float(time_defect),
        profile_defect=float(profile_defect),
    )


def residual(sol: PiecewiseSolution, grid: SpaceTimeGrid, w0: float = 0.0) -> ResidualReport:
    """Evaluate -u_t det D^2 u - 1 on every (t, r) grid pair.

    phi'' is the derivative of the interpolated phi', so the residual tests
    the interpolant and not just the ODE identity used to store phi''.
    """
    n = sol.n
    if grid.radii.max() > sol.r_max:
        raise CoverageMismatch(f"grid reaches r = {grid.radii.max():.6g} beyond r_max = {sol.r_max:.6g}")
    r = grid.radii
    phi, dphi, d2phi = sol(r), sol(r, 1), sol(r, 2)
    w, dw = _time_factors(grid.times, w0, n)
    u_t = dw[:, None] * phi[None, :]
    u_r = w[:, None] * dphi[None, :]
    u_rr = w[:, None] * d2phi[None, :]
    res = radial_pde_residual(u_t, u_r, u_rr, r[None, :], n)
    time_defect = np.max(np.abs(-dw * w**n - 1.0))
    profile_defect = np.max(np.abs(phi * d2phi * (dphi / r) ** (n - 1) - 1.0))
    return _report(res, grid, time_defect, profile_defect)


def liouville_residual(grid: SpaceTimeGrid, n: int) -> ResidualReport:
    """Residual of the model solution u = -t + |x|^2/2 (exactly zero)."""
    n = check_dimension(n)
    shape = (grid.times.size, grid.radii.size)
    r = np.broadcast_to(grid.radii, shape)
    res = radial_pde_residual(np.full(shape, -1.0), r, np.ones(shape), r, n)
    return _report(res, grid, 0.0, 0.0)


def hessian_eigenvalues(sol: PiecewiseSolution, r, t: float, w0: float = 0.0):
    """(w phi'', w phi'/r): the radial eigenvalue and the (n-1)-fold tangential one."""
    r = np.asarray(r, dtype=float)
    w, _ = time_factor(t, w0, sol.n)
    return w * sol(r, 2), w * sol(r, 1) / r


def parabolic_convexity(sol: PiecewiseSolution, grid: SpaceTimeGrid, w0: float = 0.0) -> bool:
    """Convex in x (phi' >= 0, phi'' >= 0) and non-increasing in t (w' phi <= 0)."""
    r = grid.radii[grid.radii <= sol.r_max]
    if r.size == 0:
        raise CoverageMismatch("no grid radius inside the solution range")
    _, dw = _time_factors(grid.times, w0, sol.n)
    phi = sol(r)
    convex = np.all(sol(r, 1) >= 0) and np.all(sol(r, 2) >= 0)
    monotone = np.all(dw[:, None] * phi[None, :] <= 0)
    return bool(convex and monotone)


@dataclass
class ConditionCheck:
    ut_min_seen: float
    ut_max_seen: float
    m1_m2_exist: bool
    log_slope: float

    def to_dict(self) -> dict:
        return {
            "ut_min_seen": self.ut_min_seen,
            "ut_max_seen": self.ut_max_seen,
            "m1_m2_exist": self.m1_m2_exist,
            "log_slope": self.log_slope,
        }


def ut_unboundedness(sol: PiecewiseSolution, t_samples, w0: float = 0.0) -> ConditionCheck:
    """Test -m1 <= u_t <= -m2 < 0 along the axis, u_t(0, t) = w'(t) phi(0).

    With w0 = 0, |u_t| behaves like (n+1)^{-n/(n+1)} |t|^{-n/(n+1)}: it tends
    to 0 as t -> -inf and to infinity as t -> 0-.  No constants can exist
    when the log-log slope of |u_t| against |t| stays bounded away from 0
    across the sample span, which must cover [-1e3, -1e-6].
    """
    t = np.sort(np.asarray(t_samples, dtype=float))
    if t.size < 2 or t[0] > -1e3 or t[-1] < -1e-6 or t[-1] >= 0:
        raise ValueError("t_samples must be negative and span at least [-1e3, -1e-6]")
    _, dw = _time_factors(t, w0, sol.n)
    ut = dw * sol.phi[0]
    slope = np.polyfit(np.log(-t), np.log(-ut), 1)[0]
    # the same power law holds at both ends when w0 = 0; a slope of zero would mean a bounded u_t
    unbounded = abs(slope) > 0.1 and w0 == 0.0
    return ConditionCheck(float(ut.min()), float(ut.max()), not unbounded, float(slope))


def ratio_to_u0(sol: PiecewiseSolution, t: float, radii, w0: float = 0.0) -> np.ndarray:
    """u(x, t) / u0(x, t) along ``radii`` (positive, increasing)."""
    if t >= 0:
        raise ValueError("t must be negative")
    r = np.asarray(radii, dtype=float)
    if np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise ValueError("radii must be positive and increasing")
    w, _ = time_factor(t, w0, sol.n)
    u0 = np.array([u0_reference(float(x), t, sol.n) for x in r])
    return w * sol(r) / u0


def residual_report(sol: PiecewiseSolution, grid: SpaceTimeGrid, w0: float = 0.0) -> dict:
    rep = residual(sol, grid, w0)
    t_wide = -np.geomspace(1e3, 1e-6, 64)
    cond = ut_unboundedness(sol, t_wide, w0) if w0 == 0.0 else None
    return {
        "max_abs_residual": rep.max_abs_residual,
        "at_r": rep.at_r,
        "at_t": rep.at_t,
        "samples": rep.samples,
        "convexity_pass": parabolic_convexity(sol, grid, w0),
        "ut_bounded": None if cond is None else cond.m1_m2_exist,
        "ut_min_seen": None if cond is None else cond.ut_min_seen,
        "ut_max_seen": None if cond is None else cond.ut_max_seen,
    }

