# %% [markdown]
# # Building the radial profile three ways
#
# The profile phi of u(x, t) = w(t) phi(|x|) solves
# phi (phi')^{n-1} phi'' = r^{n-1} with phi(0) = 1, phi'(0) = 0.
# Written as phi' = F(r, phi) the right-hand side depends on the whole history
# of phi, so we build it by an Euler polygon, by Picard iteration and by a
# high-order integrator, then check that they agree within a Gronwall envelope.

# %%
import numpy as np

from pma_radial import bounds, radial
from pma_radial.constants import sandwich_constants
from pma_radial.solution import SolveConfig

n = 3

# %% [markdown]
# ## Euler polygon on [0, 1]
# Each segment uses the slope F at its left end.  Because F(r, phi) <= r, the
# measured defect per segment is at most the step, far below 2^{1/n} m^{-1/n}.

# %%
for m in (100, 1000, 10000):
    e = radial.euler_break_line(SolveConfig(n=n, r_max=1.0, m_euler=m))
    print(f"m={m:6d}  sup defect={e.segment_defects.max():.3e}  bound={2 ** (1 / n) * m ** (-1 / n):.3e}")

# %% [markdown]
# ## Picard iteration brackets the solution
# The integral map is antitone: starting from phi = 1 the even iterates rise
# and the odd ones fall.

# %%
ref = radial.integrate_reference(SolveConfig(n=n, r_max=1e4))
knots = np.linspace(0, 10, 1001)
for k, it in enumerate(radial.picard_iterates(radial.constant_profile(n, knots), 7)):
    gap = it.phi - ref(knots)
    side = "below" if gap.max() <= 1e-10 else "above"
    print(f"iterate {k}: {side} the reference, sup gap {np.abs(gap).max():.2e}")

# %% [markdown]
# ## Certificates
# Each solution carries a claimed defect.  Two solutions are consistent when
# their distance is within (eps_a + eps_b) exp(C R^2).

# %%
euler = radial.euler_break_line(SolveConfig(n=n, r_max=1.0, m_euler=1000))
limit = radial.picard_limit(euler)
for name, (a, b) in {"reference/euler": (ref, euler), "reference/picard": (ref, limit)}.items():
    cert = radial.cross_validate(a, b, 1.0)
    print(f"{name:18s} distance={cert.sup_distance:.2e}  envelope={cert.bound:.2e}  ok={cert.admissible}")

bumped = ref.replace(phi=ref.phi + 1e-6)
print("perturbed reference accepted?", radial.cross_validate(bumped, limit, 1.0).admissible)

# %% [markdown]
# ## Power-law bounds
# Bootstrapping lower and upper bounds drives the exponent to 2n/(n+1); the
# limiting constants sandwich the computed profile.

# %%
lower, trace = bounds.iterate_bounds(n, 30)
print("limit exponent", lower.exponent, "coefficient", lower.coef, "C3", sandwich_constants(n)[0])
print(bounds.verify_sandwich(ref).to_dict())
