"""
Legendre basis and Gauss rules
==============================

A first look at the building blocks: Gauss-Legendre rules, the Legendre
basis and the round trip between functions and coefficients.
"""

# %%
# A Gauss rule with n points is exact for polynomials up to degree 2n - 1.
import numpy as np
from nlwave import gauss_rule, gram_matrix, project, synthesize

rule = gauss_rule(8)
print("nodes  ", np.round(rule.nodes, 6))
print("weights", np.round(rule.weights, 6))
print("int x^14 =", rule.integrate(lambda x: x ** 14), "exact", 2 / 15)

# %%
# The discrete Gram matrix of L_0..L_N is diagonal with entries 2/(2k+1).
G = gram_matrix(6, gauss_rule(7))
print(np.round(G, 12))

# %%
# Projection and synthesis: a smooth pulse needs a few dozen coefficients.
pulse = lambda x: np.exp(-100 * x ** 2)
xs = np.linspace(-1, 1, 1001)
for N in (16, 32, 48, 64):
    a = project(pulse, N, gauss_rule(N + 1))
    err = np.max(np.abs(synthesize(a, xs) - pulse(xs)))
    print(f"N={N:3d}  max interpolation error {err:.2e}")
