from functools import lru_cache

import pytest

from pma_radial import radial
from pma_radial.solution import SolveConfig


@lru_cache(maxsize=None)
def reference(n: int, r_max: float, tol: float = 1e-10):
    """Reference profiles are deterministic, so one per (n, r_max, tol) is shared."""
    return radial.integrate_reference(SolveConfig(n=n, r_max=r_max, tol=tol))


@pytest.fixture
def ref():
    return reference
