"""
Closed-form damping flows and the exact decay law
=================================================

The splitting scheme owes its unconditional stability to solving the
density ODE  rho' = -2 g(rho) rho  exactly inside every half step.  This
script prints the closed-form flow maps h(s, r) next to a high-resolution
Runge-Kutta reference for each damping law, then demonstrates the
resulting exact normalization decay N(t) = e^{-2 delta t} N(0) on a 2-D
run: the relative error sits at rounding level for *any* step size.
"""

import math

import numpy as np

from dnls import (
    ComplexField,
    CubicQuinticDamping,
    FlowContext,
    GaussianSpec,
    LinearDamping,
    NumericDamping,
    PowerLawDamping,
    Schedule,
    SimState,
    ZeroPotential,
    gaussian_init,
    make_grid,
    normalization,
    strang_step,
)

# -- flow maps against the numeric fallback ----------------------------------

ctx = FlowContext(beta=8.0, sigma=1.0)
laws = [
    ("linear       g = delta", LinearDamping(0.5)),
    ("cubic        g = delta beta rho", PowerLawDamping(0.3, 1.0)),
    ("quintic      g = delta beta^2 rho^2", PowerLawDamping(0.3, 2.0)),
    ("cubic+quintic combo", CubicQuinticDamping(0.2, 0.1)),
]
s = np.array([0.25, 1.0, 4.0])
r = 0.1

print(f"flow map h(s, r) at r = {r}, beta = {ctx.beta}")
print(f"{'law':38s} {'s':>6s} {'closed form':>14s} {'RK4 reference':>14s}")
for label, law in laws:
    oracle = NumericDamping(lambda rho, _l=law: _l.rate(ctx, rho),
                            substeps=2048, panels=2048)
    h_ref, _, _ = oracle.flow(ctx, s, r)
    h_exact = law.h(ctx, s, r)
    for si, he, hr in zip(s, np.atleast_1d(h_exact), np.atleast_1d(h_ref)):
        print(f"{label:38s} {si:6.2f} {he:14.10f} {hr:14.10f}")

# -- exact decay for outrageous step sizes ------------------------------------

print("\nnormalization decay under linear damping (delta = 0.5):")
grid = make_grid([(-16.0, 16.0, 128), (-16.0, 16.0, 128)])
field = gaussian_init(grid, GaussianSpec(eps=0.2, gamma_y=2.0))

for k in (1e-3, 1e-1, 1.0):
    state = SimState(field=field.copy(), k=k, law=LinearDamping(0.5),
                     potential=ZeroPotential(), schedule=Schedule.constant(8.0))
    n0 = normalization(state.field)
    for _ in range(5):
        state = strang_step(state)
    expected = n0 * math.exp(-2.0 * 0.5 * state.time)
    rel = abs(normalization(state.field) / expected - 1.0)
    print(f"    k = {k:5g}: after 5 steps N/N_expected - 1 = {rel:.2e}")

print("\nThe decay is exact because |psi| changes only through F(s, r),")
print("which integrates g along the exact density flow; no step-size")
print("restriction enters anywhere.")
