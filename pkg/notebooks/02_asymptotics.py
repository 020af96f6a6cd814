# %% [markdown]
# # Large-r behaviour
#
# phi(r) grows like c_n r^a with a = 2n/(n+1).  In s = r^a the deviation
# Psi = phi - c_n s obeys, to leading order, a constant-coefficient linear
# equation in ln s whose characteristic roots set the decay.

# %%
import numpy as np

from pma_radial import asymptotics as A
from pma_radial import radial
from pma_radial.constants import characteristic_roots, leading_coefficient, refined_exponent
from pma_radial.solution import SolveConfig

sols = {n: radial.integrate_reference(SolveConfig(n=n, r_max=1e6)) for n in range(2, 9)}

# %% [markdown]
# ## Leading ratios

# %%
for n, sol in sols.items():
    tr = A.ratio_trace(sol)
    c = leading_coefficient(n)
    print(f"n={n}  c_n={c:.9f}  ratio0-1={tr.ratio0[-1] / c - 1:+.2e}  "
          f"ratio1-1={tr.ratio1[-1] / c - 1:+.2e}  ratio2-1={tr.ratio2[-1] / c - 1:+.2e}")

# %% [markdown]
# ## Decay of the deviation
# Complex roots (n = 4, 5) give a damped oscillation; from n = 6 on the roots
# are real.  For n = 2, 3 we only look at the envelope: no rate is claimed.

# %%
for n in range(4, 9):
    dev = A.deviation_trace(sols[n])
    fit = A.decay_fit(dev, A.window_from_radii(n, 1e3, 1e6))
    lam = characteristic_roots(n)[0]
    print(f"n={n}  fitted {fit.exponent:+.6f} +/- {fit.frequency:.6f}i ({fit.method})  "
          f"root {lam.real:+.6f} +/- {abs(lam.imag):.6f}i  K fit {fit.radial_exponent:.5f} vs {refined_exponent(n):.5f}")

for n in (2, 3):
    dev = A.deviation_trace(sols[n], 1e4)
    env = A.ratio_deviation_envelope(dev)
    print(f"n={n}  envelope of |ratio0/c - 1| from {env[0]:.2e} to {env[-1]:.2e}, "
          f"non-increasing: {A.is_non_increasing(env, 1e-9)}")

# %% [markdown]
# ## The refined constant
# |phi - c_n r^a| r^{K_n} stays bounded; its sup over r >= 100 is the constant
# hidden in the O-term.

# %%
for n in range(4, 9):
    print(f"n={n}  sup |phi - c r^a| r^K = {A.refined_error_check(sols[n]):.4f}")

# %% [markdown]
# ## The pincer on a finite window
# The limsup/liminf inequalities are statements about limits.  For n >= 4 the
# window is already tight enough; for n = 2, 3 the slow oscillation leaves a
# visible shortfall.

# %%
for n, sol in sols.items():
    est = A.pincer_estimate(A.ratio_trace(sol))
    print(f"n={n}  K_bar-K_under={est.K_bar - est.K_under:.2e}  gaps=({est.lower_gap:.1e}, {est.upper_gap:.1e})")
