"""
Convergence and stability
=========================

A manufactured solution u*(x, t) = exp(-9 x^2) cos t gives exact errors.
"""

# %%
import numpy as np
from nlwave import KernelSpec, build_system, spectral_radius_report
from nlwave.analysis import gauss_cos_solution, manufactured_study

spec = KernelSpec(400)
spatial, temporal = manufactured_study(gauss_cos_solution(), spec, 1.0, [8, 16, 24, 32],
                                       [1 / 40, 1 / 80, 1 / 160, 1 / 320, 1 / 640], T=0.1)
for row in spatial.rows():
    print(row)
for row in temporal.rows():
    print(row)
print("fitted temporal order:", round(temporal.fitted_order, 3))

# %%
# The fully implicit scheme is stable for any step; the explicit one is not.
system = build_system(spec, 8, rho=1.0)
for dt in (1e-3, 1e-1, 1.0, 10.0):
    imp = spectral_radius_report(system, dt, "paperImplicit", power=False).radius
    exp = spectral_radius_report(system, dt, "explicitCentral", power=False).radius
    print(f"dt={dt:<6} paperImplicit {imp:.12f}   explicitCentral {exp:.6f}")
