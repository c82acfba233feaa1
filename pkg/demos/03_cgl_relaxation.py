"""
Complex Ginzburg-Landau: relaxation to the stable density
=========================================================

With the dissipative dispersion (1 - i eps) Delta and the cubic
gain-loss law g = delta2 rho - delta1, every smooth state relaxes to the
uniform density rho* = delta1 / delta2.  The law's gain region (g < 0
below rho*) rules out a norm-decay guarantee, but the exact pointwise
flow still integrates it stably for any step size.

This script starts a Gaussian bump on the periodic box well below rho*,
integrates the CGL flow, and prints the march of the density extremes
toward the fixed point.
"""

import numpy as np

from dnls import (
    Basis,
    ComplexField,
    GaussianSpec,
    GinzburgLandauLaw,
    Schedule,
    SimState,
    ZeroPotential,
    cgl_dispersion,
    evolve,
    gaussian_init,
    make_grid,
)

delta1, delta2 = 0.3, 0.15
rho_star = delta1 / delta2

grid = make_grid([(-8.0, 8.0, 64), (-8.0, 8.0, 64)], Basis.FOURIER)
field = gaussian_init(grid, GaussianSpec(eps=1.0, gamma_y=1.0))

state = SimState(
    field=field,
    k=1e-2,
    law=GinzburgLandauLaw(delta1, delta2),
    potential=ZeroPotential(),
    schedule=Schedule.constant(1.0),   # the law is derived for beta = 1
    dispersion=cgl_dispersion(0.01),
)

print(f"target density rho* = delta1/delta2 = {rho_star}")
print(f"{'t':>6s} {'min rho':>12s} {'max rho':>12s}")

t = 0.0
for _ in range(8):
    t = round(t + 0.5, 10)
    state, _ = evolve(state, t, stride=50)
    rho = state.field.density()
    print(f"{t:6.2f} {float(rho.min()):12.6f} {float(rho.max()):12.6f}")

spread = float(np.max(np.abs(state.field.density() - rho_star)))
print(f"\nafter t = {t}: max |rho - rho*| = {spread:.2e}")
print("both extremes close on rho*; the gain lifts the dilute tails while")
print("the quintic-free cubic loss caps the crest, and the viscous kinetic")
print("factor damps every nonzero mode.")
