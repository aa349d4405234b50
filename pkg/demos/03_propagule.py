"""Critical propagule for the cubic model and its fate under the PDE."""
from frontgate.pde import Grid1D, InitialDatum, simulate_frequency_law
from frontgate.propagule import bubble_profile
from frontgate.reaction import constant_law, make_cubic

model = make_cubic(0.25)
print(f"theta_c = {model.theta_c:.5f}")
for alpha in (0.5, 0.8, 0.95):
    prop = bubble_profile(model, None, alpha)
    print(f"alpha = {alpha}: half-length {prop.L:.4f}")

prop = bubble_profile(model, None, 0.8)
res = simulate_frequency_law(model, constant_law(), InitialDatum.from_propagule(prop),
                             Grid1D(), T=100.0, snapshot_every=10.0)
for t, p in zip(res.times, res.at(0.0)):
    print(f"t = {t:6.1f}  p(t, 0) = {p:.5f}")
