"""Power-law bounds on phi and the lower/upper bootstrapping between them.

A lower bound phi >= C1 r^k yields an upper bound 1 + C r^{2-k/n}; an upper
bound phi <= 1 + C2 r^k yields a lower bound r^{2-k/n} / (2 (1+C2)^{1/n}).
Alternating the two drives the exponent to 2n/(n+1).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .constants import check_dimension, growth_exponent, sandwich_constants
from .errors import ExponentOutOfRange
from .solution import PiecewiseSolution

_EPS = 1e-12


@dataclass(frozen=True)
class PowerBound:
    """coef r^exponent (lower) or 1 + coef r^exponent (upper)."""

    coef: float
    exponent: float
    side: Literal["lower", "upper"]

    @property
    def offset(self) -> float:
        return 1.0 if self.side == "upper" else 0.0

    def __call__(self, r):
        return self.offset + self.coef * np.asarray(r, dtype=float) ** self.exponent

    def holds(self, r, phi, rtol: float = 0.0) -> np.ndarray:
        """Pointwise truth of the bound for samples ``phi`` at radii ``r``."""
        b = self(r)
        if self.side == "lower":
            return phi >= b * (1 - rtol)
        return phi <= b * (1 + rtol)


def upper_from_lower(b: PowerBound, n: int) -> PowerBound:
    """phi >= C1 r^k  with 0 <= k <= 2n/(n+1)  implies
    phi <= 1 + C1^{-1/n} ((n+1)/(n-1))^{1/n} (n+1)/(2n) r^{2-k/n}."""
    n = check_dimension(n, 2)
    if b.side != "lower":
        raise ValueError("expected a lower bound")
    if not (-_EPS <= b.exponent <= growth_exponent(n) + _EPS):
        raise ExponentOutOfRange(f"lower exponent {b.exponent} not in [0, 2n/(n+1)]")
    if b.coef <= 0:
        raise ValueError("coefficient must be positive")
    coef = b.coef ** (-1 / n) * ((n + 1) / (n - 1)) ** (1 / n) * (n + 1) / (2 * n)
    return PowerBound(coef, 2 - b.exponent / n, "upper")


def lower_from_upper(b: PowerBound, n: int) -> PowerBound:
    """phi <= 1 + C2 r^k  with 2n/(n+1) <= k <= n  implies
    phi >= r^{2-k/n} / (2 (1+C2)^{1/n})."""
    n = check_dimension(n, 2)
    if b.side != "upper":
        raise ValueError("expected an upper bound")
    if not (growth_exponent(n) - _EPS <= b.exponent <= n + _EPS):
        raise ExponentOutOfRange(f"upper exponent {b.exponent} not in [2n/(n+1), n]")
    return PowerBound(0.5 * (1 + b.coef) ** (-1 / n), 2 - b.exponent / n, "lower")


def iteration_step(b: PowerBound, n: int) -> PowerBound:
    """The composite map with the simplified coefficient valid for C1 <= 1:
    p -> 2^{-(n+1)/n} ((n+1)/(n-1))^{-1/n^2} ((n+1)/n)^{-1/n} p^{1/n^2},
    k -> (2n-2)/n + k/n^2."""
    n = check_dimension(n, 2)
    c1 = min(b.coef, 1.0)
    coef = (
        2.0 ** (-(n + 1) / n)
        * ((n + 1) / (n - 1)) ** (-1 / n**2)
        * ((n + 1) / n) ** (-1 / n)
        * c1 ** (1 / n**2)
    )
    return PowerBound(coef, (2 * n - 2) / n + b.exponent / n**2, "lower")


@dataclass(frozen=True)
class IterationStep:
    m: int
    upper: PowerBound  # from the previous lower bound
    lower: PowerBound  # the new lower bound


def iterate_bounds(n: int, M: int) -> tuple[PowerBound, list[IterationStep]]:
    """Run the bootstrapping M times from phi >= 1."""
    n = check_dimension(n, 2)
    if M < 1:
        raise ValueError("M must be at least 1")
    lower = PowerBound(1.0, 0.0, "lower")
    trace = []
    for m in range(1, M + 1):
        upper = upper_from_lower(PowerBound(min(lower.coef, 1.0), lower.exponent, "lower"), n)
        lower = iteration_step(lower, n)
        trace.append(IterationStep(m, upper, lower))
    return lower, trace


def chebyshev_points(knots: np.ndarray, per_interval: int = 8) -> np.ndarray:
    """Knots plus Chebyshev points of every interval, sorted."""
    j = np.arange(per_interval)
    x = 0.5 * (1 - np.cos((2 * j + 1) * np.pi / (2 * per_interval)))
    a, b = knots[:-1], knots[1:]
    inner = (a[:, None] + (b - a)[:, None] * x).ravel()
    return np.sort(np.concatenate([knots, inner]))


@dataclass
class SandwichReport:
    passed: bool
    worst_margin_lower: float
    worst_margin_upper: float
    at_r: float
    points: int
    violations: int
    within_tolerance: int

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "worst_margin_lower": self.worst_margin_lower,
            "worst_margin_upper": self.worst_margin_upper,
            "at_r": self.at_r,
            "points": self.points,
            "violations": self.violations,
            "within_tolerance": self.within_tolerance,
        }


def verify_sandwich(sol: PiecewiseSolution, tol: float = 1e-10, per_interval: int = 8) -> SandwichReport:
    """Check C3 r^a <= phi <= 1 + C4 r^a at knots and Chebyshev points.

    Margins are relative to the bound.  Negative margins down to -10 tol are
    counted as within numerical tolerance, not as failures.
    """
    n = sol.n
    alpha = growth_exponent(n)
    c3, c4 = sandwich_constants(n)
    r = chebyshev_points(sol.knots, per_interval)
    phi = sol(r)
    ra = r**alpha
    lo = c3 * ra
    hi = 1.0 + c4 * ra
    with np.errstate(divide="ignore", invalid="ignore"):
        m_lo = np.where(lo > 0, (phi - lo) / np.where(lo > 0, lo, 1.0), np.inf)
    m_hi = (hi - phi) / hi
    worst = np.minimum(m_lo, m_hi)
    slack = 10 * tol
    violations = int(np.sum(worst < -slack))
    within = int(np.sum((worst < 0) & (worst >= -slack)))
    return SandwichReport(
        passed=violations == 0,
        worst_margin_lower=float(np.min(m_lo)),
        worst_margin_upper=float(np.min(m_hi)),
        at_r=float(r[np.argmin(worst)]),
        points=int(r.size),
        violations=violations,
        within_tolerance=within,
    )


def trace_bounds_hold(sol: PiecewiseSolution, trace: list[IterationStep], rtol: float = 0.0) -> bool:
    """Every bound produced along an iteration trace holds at all knots."""
    r, phi = sol.knots, sol.phi
    for step in trace:
        if not (np.all(step.lower.holds(r, phi, rtol)) and np.all(step.upper.holds(r, phi, rtol))):
            return False
    return True
