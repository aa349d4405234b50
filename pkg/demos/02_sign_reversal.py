"""Speed-sign reversal for the Wolbachia frequency model.

Scans the sign of the front speed against the crossing parameter eps and
runs one receding front inside the negative range.
"""
import numpy as np

from frontgate.cli import sign_changes, sign_curve
from frontgate.pde import Grid1D, simulate_frequency_law
from frontgate.reaction import (WolbachiaParams, make_wolbachia_f, make_wolbachia_h,
                                speed_sign_integral)

params = WolbachiaParams()
eps = np.linspace(0.0, 0.64, 65)
values = sign_curve(params, eps)
print("negative intervals:", sign_changes(eps, values))

model = make_wolbachia_f(params)
law = make_wolbachia_h(WolbachiaParams(eps=0.5)).normalize()
print(f"eps = 0.5: int f h^4 = {speed_sign_integral(model, law):.4e}")

grid = Grid1D(-30, 30, 0.1)
x = grid.x
bump = 0.25 * (1 - np.tanh((x - 10) / 2)) * (1 + np.tanh((x + 10) / 2))
res = simulate_frequency_law(model, law, bump, grid, dt=0.01, T=200.0, snapshot_every=20.0)
for t, xf in zip(res.times, res.front_positions):
    print(f"t = {t:6.1f}  front at {xf:8.3f}")
