"""
Two cross-checks: collocation and the local limit
=================================================

The Galerkin solution is compared with an independent nodal discretization,
and with the classical wave equation that the nonlocal model approaches as
the kernel narrows.
"""

# %%
import numpy as np
from nlwave import KernelSpec, build_system, composite_grid, run, run_collocation_1d
from nlwave.analysis import local_reference, taylor_coefficients

u0 = lambda x: np.exp(-100 * x ** 2)
spec = KernelSpec(400)
for N, Nh in ((48, 16), (64, 32), (80, 64)):
    grid = composite_grid(-1, 1, Nh, 8)
    c = run_collocation_1d(spec, grid, 0.1, None, u0, None, 0.005, 0.5)[-1]
    g = run(build_system(spec, N, rho=0.1), u0, None, 0.005, 0.5, grid.points)[-1]
    print(f"Galerkin N={N}, collocation {Nh}x8: max gap {np.max(np.abs(c.us - g.us)):.2e}")

# %%
# The second Taylor moment sets the local wave speed: C2 = rho sigma^2 / 2.
for s in (400, 1600, 6400):
    spec = KernelSpec(s)
    C2 = taylor_coefficients(spec, 1.0, 2).C2
    ref = local_reference(C2, u0, None, -1, 1, 0.25, 2001, 1e-3, snapshot_times=[0.25])[-1]
    nl = run(build_system(spec, 96), u0, None, 1e-3, 0.25, ref.xs, [0.25], "averagedImplicit")[-1]
    print(f"s={s:5d}  C2={C2:.3e}  nonlocal vs local gap {np.max(np.abs(nl.us - ref.us)):.2e}")
