"""Closed-form dimensional constants for the radial solution of -u_t det D^2 u = 1.

Everything here is a pure function of the dimension ``n`` (and, for the
elementary functions, of ``t`` or ``|x|``).  The other modules treat these
values as ground truth.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DerivativeSingular, DimensionOutOfRange

MAX_DIMENSION = 64


def check_dimension(n: int, minimum: int = 1) -> int:
    """Validate ``n`` and return it as a plain int."""
    if isinstance(n, bool) or int(n) != n:
        raise DimensionOutOfRange(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n < minimum or n > MAX_DIMENSION:
        raise DimensionOutOfRange(
            f"dimension n={n} outside the supported range [{minimum}, {MAX_DIMENSION}]"
        )
    return n


def growth_exponent(n: int) -> float:
    """The power 2n/(n+1) governing phi(r) ~ c_n r^(2n/(n+1))."""
    n = check_dimension(n)
    return 2.0 * n / (n + 1)


def leading_coefficient(n: int) -> float:
    """c_n = (n+1) / ((2n)^(n/(n+1)) (n-1)^(1/(n+1))), defined for n >= 2."""
    n = check_dimension(n, 2)
    return (n + 1) / ((2 * n) ** (n / (n + 1)) * (n - 1) ** (1 / (n + 1)))


def characteristic_roots(n: int) -> tuple[complex, complex]:
    """Roots of lambda^2 + (n-3)/2 lambda + (n-1)/(2n) = 0.

    ``lambda_plus`` carries the ``+`` branch of the square root, so it is the
    slower decaying root when both are real and the root with positive
    imaginary part otherwise.
    """
    n = check_dimension(n, 2)
    b = (n - 3) / 2
    c = (n - 1) / (2 * n)
    disc = b * b - 4 * c
    if disc >= 0:
        # real roots only occur for n >= 6, where b > 0; Vieta avoids the
        # cancellation in -b + sqrt(disc)
        lam_minus = (-b - math.sqrt(disc)) / 2
        return complex(c / lam_minus), complex(lam_minus)
    sq = cmath.sqrt(disc)
    return (-b + sq) / 2, (-b - sq) / 2


def decay_exponent(n: int) -> float:
    """k_n = Re(lambda_plus): the decay rate of the deviation in ln s."""
    return characteristic_roots(n)[0].real


def refined_exponent(n: int) -> float:
    """K_n, the algebraic decay rate of phi(r) - c_n r^(2n/(n+1)).

    Only defined for n >= 4; the n = 2, 3 rates are not known.
    """
    n = check_dimension(n, 4)
    if n in (4, 5):
        return float(Fraction(n * (n - 3), 2 * (n + 1)))
    b = (n - 3) / 2
    q = 2 * (n - 1) / n
    # (n-3)/2 - sqrt((n-3)^2/4 - q), rationalised
    return n / (n + 1) * q / (b + math.sqrt(b * b - q))


def sandwich_constants(n: int) -> tuple[float, float]:
    """Return (C3, C4) with C3 r^a <= phi(r) <= 1 + C4 r^a, a = 2n/(n+1)."""
    n = check_dimension(n, 2)
    c3 = (
        2.0 ** (-n / (n - 1))
        * ((n + 1) / (n - 1)) ** (-1 / (n * n - 1))
        * ((n + 1) / n) ** (-n / (n * n - 1))
    )
    c4 = c3 ** (-1 / n) * ((n + 1) / (n - 1)) ** (1 / n) * (n + 1) / (2 * n)
    return c3, c4


def first_iteration_coefficient(n: int) -> float:
    """p_1 = 2^{-(n+1)/n} ((n+1)/(n-1))^{-1/n^2} ((n+1)/n)^{-1/n}."""
    n = check_dimension(n, 2)
    return (
        2.0 ** (-(n + 1) / n)
        * ((n + 1) / (n - 1)) ** (-1 / n**2)
        * ((n + 1) / n) ** (-1 / n)
    )


@dataclass(frozen=True)
class IterationState:
    m: int
    p_m: float
    k_m: float


def iteration_sequence(n: int, M: int) -> list[IterationState]:
    """Lower-bound coefficients and exponents p_m r^{k_m} for m = 1..M.

    Seeded with p_0 = 1, k_0 = 0 (the bound phi >= 1).
    """
    n = check_dimension(n, 2)
    if M < 1:
        raise ValueError("M must be at least 1")
    p1 = first_iteration_coefficient(n)
    p, k = 1.0, 0.0
    states = []
    for m in range(1, M + 1):
        p = p1 * p ** (1 / n**2)
        k = (2 * n - 2) / n + k / n**2
        states.append(IterationState(m, p, k))
    return states


def time_factor(t: float, w0: float, n: int) -> tuple[float, float]:
    """w(t) = (w0^{n+1} - (n+1) t)^{1/(n+1)} and w'(t) = -w^{-n}."""
    n = check_dimension(n)
    if t > 0:
        raise ValueError("time must be non-positive")
    if w0 < 0:
        raise ValueError("w0 must be non-negative")
    base = w0 ** (n + 1) - (n + 1) * t
    w = base ** (1 / (n + 1))
    if w == 0:
        raise DerivativeSingular("w'(t) is unbounded at t = 0 when w(0) = 0")
    return w, -(w ** (-n))


def u0_coefficient(n: int) -> float:
    """((n+1)^{n+2} / ((2n)^n (n-1)))^{1/(n+1)}."""
    n = check_dimension(n, 2)
    # logs keep the big powers finite up to MAX_DIMENSION
    log_val = ((n + 2) * math.log(n + 1) - n * math.log(2 * n) - math.log(n - 1)) / (n + 1)
    return math.exp(log_val)


def u0_reference(x_norm: float, t: float, n: int) -> float:
    """The viscosity solution u0(x, t) = coef (-t)^{1/(n+1)} |x|^{2n/(n+1)}."""
    if t >= 0:
        raise ValueError("u0 is evaluated at negative times only")
    if x_norm < 0:
        raise ValueError("x_norm must be non-negative")
    return u0_coefficient(n) * (-t) ** (1 / (n + 1)) * x_norm ** growth_exponent(n)


@dataclass(frozen=True)
class AsymptoticConstants:
    n: int
    c_n: float
    K_n: float | None
    k_n: float | None
    lambda_plus: complex
    lambda_minus: complex
    C3: float
    C4: float
    u0_coef: float

    def to_dict(self) -> dict:
        return {
            "c_n": self.c_n,
            "K_n": self.K_n,
            "k_n": self.k_n,
            "lambda_plus": {"re": self.lambda_plus.real, "im": self.lambda_plus.imag},
            "lambda_minus": {"re": self.lambda_minus.real, "im": self.lambda_minus.imag},
            "C3": self.C3,
            "C4": self.C4,
            "u0_coef": self.u0_coef,
        }


def asymptotic_constants(n: int) -> AsymptoticConstants:
    n = check_dimension(n, 2)
    lam_p, lam_m = characteristic_roots(n)
    c3, c4 = sandwich_constants(n)
    refined = n >= 4
    return AsymptoticConstants(
        n=n,
        c_n=leading_coefficient(n),
        K_n=refined_exponent(n) if refined else None,
        k_n=lam_p.real if refined else None,
        lambda_plus=lam_p,
        lambda_minus=lam_m,
        C3=c3,
        C4=c4,
        u0_coef=u0_coefficient(n),
    )
