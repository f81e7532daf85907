"""State evolution: predicting AMP's per-iteration error before running it.

Iterates the scalar recursion for the ternary and Gaussian priors, brackets
the Gaussian fixed point with its closed form, samples the fixed-point map
on a log grid (the diagram whose crossings with the diagonal are the fixed
points), and finishes with an empirical check at n = 500.
"""

import numpy as np

import latticeamp as la

col = np.ones(16)
noise = 0.05

print("state evolution traces (uniform unit column variances, noise 0.05):")
for prior in (la.PriorModel.ternary(0.3), la.PriorModel.gaussian(2.0)):
    trace = la.state_evolution(prior, col, noise, iterations=12)
    label = prior.kind
    print(f"  {label:9s}:", " ".join(f"{v:.4f}" for v in trace.tau_tilde_sq))

print("\nGaussian fixed point vs closed form:")
fp = la.find_highest_fixed_point(la.PriorModel.gaussian(2.0), col, noise)
lo, hi = la.gaussian_fixed_point_bounds(col, noise, 2.0, m=16)
print(f"  iterated {fp:.9f}, closed-form bracket [{lo:.9f}, {hi:.9f}]")

print("\nfixed-point map Psi on a log grid (ternary, eps = 0.3):")
prior = la.PriorModel.ternary(0.3)
for tau in np.geomspace(1e-3, 1e3, 13):
    psi = la.psi(float(tau), prior, col, noise)
    marker = "  <- fixed point nearby" if abs(psi - tau) < 0.05 * tau else ""
    print(f"  tau^2 = {tau:9.3e}   Psi = {psi:9.3e}{marker}")

print("\nlarge-tau tail limit (eps * mean column variance + noise):")
print(f"  Psi(1e12) = {la.psi(1e12, prior, col, noise):.6f}, "
      f"limit = {0.3 * 1.0 + noise:.6f}")

print("\nempirical check at m = n = 500 (fresh matrix per iteration, 10 trials):")
mse, se = la.empirical_state_evolution(prior, m=500, n=500, noise_var=noise,
                                       iterations=8, trials=10, seed=7)
pred = se.tau_tilde_sq[1:9] - noise
for t, (e, p) in enumerate(zip(mse, pred), start=1):
    print(f"  t={t}: empirical {e:.5f}  predicted {p:.5f}  rel {abs(e-p)/p:.3f}")
