"""Prefix integrals I(r) = int_0^r s^{n-1}/phi(s) ds and the delay functional F."""
from __future__ import annotations

import numpy as np

from .errors import DomainExceeded
from .solution import PiecewiseSolution

GL_ORDER = 8
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
# nodes and weights mapped to [0, 1]
GL_NODES = 0.5 * (_GL_X + 1.0)
GL_WEIGHTS = 0.5 * _GL_W


def gauss_legendre(func, a, b):
    """Vectorised order-8 Gauss-Legendre rule over [a, b] (arrays broadcast)."""
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    x = a + (b - a) * GL_NODES
    return ((b - a) * GL_WEIGHTS * func(x)).sum(axis=-1)


def _integrand(sol: PiecewiseSolution):
    n = sol.n
    return lambda s: s ** (n - 1) / sol(s)


class QuadratureAccumulator:
    """Running values of I at the knots of a solution.

    Segment integrals use Gauss-Legendre on the interpolant; the error
    estimate compares the whole-segment rule with the two half-segment rules.
    Break-line construction grows the accumulator one segment at a time via
    :meth:`extend`.
    """

    def __init__(self, n: int, knots=(0.0,), prefix=(0.0,), errors=(0.0,)):
        self.n = n
        self._knots = list(knots)
        self._prefix = list(prefix)
        self._errors = list(errors)

    @classmethod
    def from_solution(cls, sol: PiecewiseSolution) -> "QuadratureAccumulator":
        f = _integrand(sol)
        a, b = sol.knots[:-1], sol.knots[1:]
        whole = gauss_legendre(f, a, b)
        mid = 0.5 * (a + b)
        halves = gauss_legendre(f, a, mid) + gauss_legendre(f, mid, b)
        acc = cls(sol.n)
        acc._knots = list(sol.knots)
        acc._prefix = [0.0] + list(np.cumsum(halves))
        acc._errors = [0.0] + list(np.cumsum(np.abs(whole - halves)))
        acc.solution = sol
        return acc

    def extend(self, r_new: float, segment_integral: float, error: float = 0.0):
        if r_new <= self._knots[-1]:
            raise ValueError("accumulator knots must increase")
        self._knots.append(r_new)
        self._prefix.append(self._prefix[-1] + segment_integral)
        self._errors.append(self._errors[-1] + error)

    @property
    def knots(self) -> np.ndarray:
        return np.asarray(self._knots)

    @property
    def prefix(self) -> np.ndarray:
        return np.asarray(self._prefix)

    @property
    def errors(self) -> np.ndarray:
        return np.asarray(self._errors)

    @property
    def last(self) -> float:
        return self._prefix[-1]

    def integral(self, r, sol: PiecewiseSolution | None = None):
        """I(r) for arbitrary r inside the covered range."""
        sol = sol if sol is not None else getattr(self, "solution", None)
        knots = self.knots
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > knots[-1] * (1 + 1e-14)):
            raise DomainExceeded(f"radius beyond the last knot {knots[-1]:.6g}")
        idx = np.clip(np.searchsorted(knots, r, side="right") - 1, 0, knots.size - 1)
        base = self.prefix[idx]
        if sol is None:
            return base
        partial = gauss_legendre(_integrand(sol), knots[idx], np.minimum(r, knots[-1]))
        return base + partial


def delay_functional(r, sol: PiecewiseSolution, acc: QuadratureAccumulator | None = None):
    """F(r, phi) = (n int_0^r s^{n-1}/phi ds)^{1/n}."""
    if acc is None:
        acc = QuadratureAccumulator.from_solution(sol)
    I = acc.integral(r, sol)
    return (sol.n * np.maximum(I, 0.0)) ** (1.0 / sol.n)


def functional_at_nodes(sol: PiecewiseSolution, acc: QuadratureAccumulator | None = None):
    """F at the Gauss-Legendre nodes of every knot interval, shape (m, 8)."""
    if acc is None:
        acc = QuadratureAccumulator.from_solution(sol)
    a, b = sol.knots[:-1], sol.knots[1:]
    nodes = a[:, None] + (b - a)[:, None] * GL_NODES
    partial = gauss_legendre(_integrand(sol), np.broadcast_to(a[:, None], nodes.shape), nodes)
    I = acc.prefix[:-1, None] + partial
    return nodes, (sol.n * np.maximum(I, 0.0)) ** (1.0 / sol.n)


def integrated_functional(sol: PiecewiseSolution, acc: QuadratureAccumulator | None = None):
    """int_0^{r_j} F(s, phi) ds at every knot r_j."""
    _, F = functional_at_nodes(sol, acc)
    h = np.diff(sol.knots)
    seg = h * (F * GL_WEIGHTS).sum(axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def integral_form_residual(sol: PiecewiseSolution, radius: float | None = None) -> float:
    """sup over knots <= radius of |phi(r) - 1 - int_0^r F(s, phi) ds|."""
    if radius is not None and radius < sol.r_max:
        cut = np.searchsorted(sol.knots, radius, side="right")
        sol = sol.replace(
            knots=sol.knots[:cut],
            phi=sol.phi[:cut],
            phi_prime=sol.phi_prime[:cut],
            phi_second=sol.phi_second[:cut],
            tail=None,
        )
    acc = QuadratureAccumulator.from_solution(sol)
    total = integrated_functional(sol, acc)
    return float(np.max(np.abs(sol.phi - 1.0 - total)))
