"""The denoisers at the heart of the AMP stage.

Shows the ternary posterior-mean threshold for several sparsity levels
(the S-curves steepen as the prior concentrates on 0), checks the closed
forms against a direct log-domain Bayes computation, and demonstrates that
the stable evaluation survives |u|/v in the thousands where a naive
sinh/cosh quotient overflows.
"""

import numpy as np

import latticeamp as la

print("eta_ternary(u, v=1) over u for several epsilon values:\n")
us = np.linspace(-4.0, 4.0, 17)
header = "u".rjust(6) + "".join(f"  eps={e:<4g}" for e in (0.1, 0.3, 0.5, 0.7, 0.9))
print(header)
for u in us:
    row = f"{u:6.1f}"
    for eps in (0.1, 0.3, 0.5, 0.7, 0.9):
        row += f"  {la.eta_ternary(u, 1.0, eps):8.4f}"
    print(row)

print("\nworst deviation from a direct Bayes posterior (should be ~1e-16):")
pts = np.array([-1.0, 0.0, 1.0])
worst = 0.0
for eps in (0.1, 0.5, 0.9):
    w = np.array([eps / 2, 1 - eps, eps / 2])
    for v in (0.1, 1.0, 10.0):
        for u in np.linspace(-5, 5, 41):
            logw = np.log(w) - (pts - u) ** 2 / (2 * v)
            logw -= logw.max()
            ww = np.exp(logw)
            mean = (ww * pts).sum() / ww.sum()
            var = (ww * (pts - mean) ** 2).sum() / ww.sum()
            worst = max(worst, abs(la.eta_ternary(u, v, eps) - mean),
                        abs(la.kappa_ternary(u, v, eps) - var))
print(f"  {worst:.3e}")

print("\nextreme ratios stay finite and saturated:")
for u in (50.0, 100.0, 500.0):
    print(f"  eta(u={u:g}, v=0.1) = {la.eta_ternary(u, 0.1, 0.5):.12f}"
          f"   kappa = {la.kappa_ternary(u, 0.1, 0.5):.3e}")

print("\na narrow discrete Gaussian collapses onto the ternary family:")
import math
eps_eff = 2 * math.exp(-50) / (1 + 2 * math.exp(-50))
for u in (2.0, 4.0, 6.0):
    d = la.eta_discrete_gaussian(u, 0.1, 0.01, 1)
    t = la.eta_ternary(u, 0.1, eps_eff)
    print(f"  u={u:g}: discrete {d: .6e}  ternary(eps_eff) {t: .6e}")
