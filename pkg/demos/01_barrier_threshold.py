"""Blocking threshold for a bistable front crossing a population step.

Computes the minimal blocking width L_* for the cubic nonlinearity, builds
the two stationary barriers just above it, and confirms with the PDE that a
front passes a narrower step but stops at a wider one.
"""
import numpy as np

from frontgate import barrier as B
from frontgate.pde import GradientProfile, Grid1D, InitialDatum, simulate_heterogeneous
from frontgate.reaction import make_cubic

model = make_cubic(0.25)
print(f"c_* = {model.c_star:.6f}, critical jump = {B.critical_jump(model):.6f}")

C = 1.0
Ls, beta, alpha = B.L_star(model, C)
print(f"C = {C}: L_* = {Ls:.6f} at (alpha, beta) = ({alpha:.4f}, {beta:.4f})")

for L in (1.5 * Ls,):
    for sol in B.enumerate_barriers(model, C, L):
        print(f"  L = {L:.3f} {sol.kind:8s} p(-L) = {sol.pair.alpha:.4f}, p(L) = {sol.pair.beta:.4f}")

grid = Grid1D(-20, 20, 0.05)
for factor in (0.8, 1.2):
    res = simulate_heterogeneous(model, GradientProfile.interval_constant(C, factor * Ls),
                                 InitialDatum.front(-14), grid, T=400.0)
    print(f"L = {factor} L_*: {res.outcome}")

Cs = np.geomspace(0.5, 20, 8)
curve = B.lstar_curve(model, Cs)
print("C       L_*      4 C L_*")
for c, l, s in zip(Cs, curve.L_star_values, curve.scaled):
    print(f"{c:7.3f} {l:8.4f} {s:8.4f}")
