"""Sampled representations of the radial profile phi and its solver settings."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Literal

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .constants import check_dimension
from .errors import DomainExceeded

MethodTag = Literal["euler", "picard", "reference"]


@dataclass(frozen=True)
class SolveConfig:
    """Discretisation parameters for the radial solvers.

    ``r_switch`` is where the Taylor series hands over to the adaptive
    integrator, ``r_log`` where the integrator switches to logarithmic
    coordinates.  ``m_euler`` is the number of break-line segments.
    """

    n: int = 2
    r_max: float = 1e4
    tol: float = 1e-10
    r_switch: float = 1e-2
    r_log: float = 10.0
    m_euler: int = 1000

    def __post_init__(self):
        check_dimension(self.n, 1)
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if not 1e-14 < self.tol < 1e-2:
            raise ValueError("tol must lie in (1e-14, 1e-2)")
        if not 0 < self.r_switch < self.r_log:
            raise ValueError("need 0 < r_switch < r_log")
        if self.m_euler < 2:
            raise ValueError("m_euler must be at least 2")


@dataclass(frozen=True, eq=False)
class DeviationTail:
    """Deviation from the leading power law in logarithmic coordinates.

    With s = r^{2n/(n+1)} and tt = ln s, ``psi`` holds Psi = Phi(s) - c_n s,
    ``dpsi`` its tt-derivative s Psi'(s) and ``d2psi`` the second
    tt-derivative.  Integrated directly, so these keep full relative accuracy
    where phi - c_n r^a would be lost to cancellation.
    """

    t_tilde: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    d2psi: np.ndarray


def ode_second_derivative(r, phi, dphi, n: int):
    """phi'' = r^{n-1} / (phi (phi')^{n-1}), with its limit phi(0)^{-1/n} at r = 0."""
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    dphi = np.asarray(dphi, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (r / dphi) ** (n - 1) / phi
    # phi' ~ phi(0)^{-1/n} r near the axis
    return np.where(r > 0, val, phi ** (-1.0 / n))


@dataclass(frozen=True, eq=False)
class PiecewiseSolution:
    """phi sampled at knots, with phi' and phi'' stored alongside.

    Evaluation between knots is cubic Hermite: phi from (phi, phi') and
    phi' from (phi', phi'').  Break lines are piecewise linear and are
    evaluated linearly.

    ``defect`` is the claimed bound on sup |phi(r) - 1 - int_0^r F(s, phi) ds|
    over [0, ``defect_radius``]; certificates compare solutions against it.
    """

    knots: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    n: int
    method_tag: MethodTag
    phi_second: np.ndarray | None = None
    defect: float | None = None
    defect_radius: float = 0.0
    segment_defects: np.ndarray | None = None
    tail: DeviationTail | None = None
    certificate: object | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        dphi = np.asarray(self.phi_prime, dtype=float)
        if knots.ndim != 1 or knots.size < 2:
            raise ValueError("need at least two knots")
        if phi.shape != knots.shape or dphi.shape != knots.shape:
            raise ValueError("knots, phi and phi_prime must have equal length")
        if knots[0] != 0.0 or np.any(np.diff(knots) <= 0):
            raise ValueError("knots must start at 0 and increase strictly")
        if self.phi_second is None:
            d2 = ode_second_derivative(knots, phi, dphi, self.n)
        else:
            d2 = np.asarray(self.phi_second, dtype=float)
        for name, arr in (("knots", knots), ("phi", phi), ("phi_prime", dphi), ("phi_second", d2)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_function(
        cls,
        n: int,
        knots,
        phi: Callable,
        dphi: Callable,
        d2phi: Callable | None = None,
        method_tag: MethodTag = "reference",
    ) -> "PiecewiseSolution":
        """Sample closed-form functions, mostly for synthetic test inputs."""
        r = np.asarray(knots, dtype=float)
        return cls(
            knots=r,
            phi=phi(r),
            phi_prime=dphi(r),
            n=n,
            method_tag=method_tag,
            phi_second=None if d2phi is None else d2phi(r),
        )

    @property
    def r_max(self) -> float:
        return float(self.knots[-1])

    def replace(self, **changes) -> "PiecewiseSolution":
        return dataclasses.replace(self, **changes)

    @cached_property
    def _value_spline(self):
        return CubicHermiteSpline(self.knots, self.phi, self.phi_prime, extrapolate=False)

    @cached_property
    def _slope_spline(self):
        return CubicHermiteSpline(self.knots, self.phi_prime, self.phi_second, extrapolate=False)

    def _check_domain(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > self.knots[-1] * (1 + 1e-14)):
            raise DomainExceeded(
                f"radius outside the solution range [0, {self.knots[-1]:.6g}]"
            )
        return np.clip(r, 0.0, self.knots[-1])

    def __call__(self, r, nu: int = 0):
        """Evaluate phi (nu=0), phi' (nu=1) or phi'' (nu=2) at ``r``."""
        r = self._check_domain(r)
        if self.method_tag == "euler":
            return self._eval_linear(r, nu)
        if nu == 0:
            return self._value_spline(r)
        if nu == 1:
            return self._slope_spline(r)
        if nu == 2:
            return self._slope_spline(r, 1)
        raise ValueError("nu must be 0, 1 or 2")

    def _eval_linear(self, r, nu):
        # each segment of a break line is straight with the slope stored at its left knot
        idx = np.clip(np.searchsorted(self.knots, r, side="right") - 1, 0, self.knots.size - 2)
        if nu == 0:
            return self.phi[idx] + self.phi_prime[idx] * (r - self.knots[idx])
        if nu == 1:
            return self.phi_prime[idx] + 0.0 * r
        return 0.0 * r

    def second_derivative_ode(self, r):
        """phi'' rebuilt from the ODE identity using interpolated phi and phi'."""
        r = np.asarray(r, dtype=float)
        return ode_second_derivative(r, self(r), self(r, 1), self.n)

    def check_invariants(self, atol: float = 0.0) -> list[str]:
        """Return descriptions of violated structural invariants (empty if none)."""
        problems = []
        if abs(self.phi[0] - 1.0) > atol:
            problems.append("phi(0) != 1")
        if abs(self.phi_prime[0]) > atol:
            problems.append("phi'(0) != 0")
        if np.any(np.diff(self.phi) < -atol):
            problems.append("phi decreases between knots")
        if np.any(self.phi < 1.0 - atol):
            problems.append("phi < 1")
        if np.any(self.phi_prime < -atol):
            problems.append("phi' < 0")
        if np.any(self.phi_second[1:] <= 0):
            problems.append("phi'' not positive")
        return problems
