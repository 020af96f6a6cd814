# %% [markdown]
# # The space-time solution, and the case n = 1
#
# u(x, t) = w(t) phi(|x|) with w(t) = (-(n+1) t)^{1/(n+1)} solves
# -u_t det D^2 u = 1 on x in R^n, t < 0.  Its time derivative is unbounded in
# both directions, and for large |x| it approaches the homogeneous solution u0.

# %%
import numpy as np

from pma_radial import dim1, pde, radial
from pma_radial.solution import SolveConfig

grid = pde.SpaceTimeGrid.geometric()

# %%
for n in (2, 3, 4):
    sol = radial.integrate_reference(SolveConfig(n=n, r_max=1e6))
    rep = pde.residual(sol, grid)
    cond = pde.ut_unboundedness(sol, -np.geomspace(1e3, 1e-6, 40))
    ratios = pde.ratio_to_u0(sol, -1.0, [1e2, 1e4, 1e6])
    print(f"n={n}  residual {rep.max_abs_residual:.1e}  convex {pde.parabolic_convexity(sol, grid)}  "
          f"u_t in [{cond.ut_min_seen:.1f}, {cond.ut_max_seen:.2e}]  u/u0 {np.round(ratios, 6)}")

print("model -t + |x|^2/2 residual:", pde.liouville_residual(grid, 3).max_abs_residual)

# %% [markdown]
# ## n = 1
# phi phi'' = 1 has the first integral (phi')^2 = 2 ln phi, so phi grows like
# r sqrt(2 ln r).  The ratio phi^2 / (r^2 ln phi) creeps to 2 at a 1/ln r pace;
# a two-parameter fit over the last two decades extrapolates the limit.

# %%
sol = dim1.solve_dim1(1e8)
for r in (1e2, 1e4, 1e6, 1e8):
    print(f"r={r:.0e}  ratio={dim1.log_ratio(sol, r):.5f}")
print(dim1.dim1_report(sol))
