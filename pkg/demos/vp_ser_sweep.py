"""Vector-perturbation SER: what the AMP refinement buys.

Five precoders share every channel, symbol vector and noise draw: exact
sphere precoding, reduction-aided ZF and SIC, and the two-phase hybrids
that refine ZF/SIC with a ternary-prior AMP stage. The hybrid curves sit
between their phase-1 parent and the sphere curve.

The SNR axis is -10 log10(noise_var) against the unit-power transmit
normalisation. Increase TRIALS for smoother curves.
"""

import sys

import numpy as np

import latticeamp as la

TRIALS = int(sys.argv[1]) if len(sys.argv) > 1 else 800

red = la.ReductionMethod.blll()
algs = (
    la.vp_algorithm("sphere", red),
    la.vp_algorithm("zf", red),
    la.vp_algorithm("sic", red),
    la.vp_algorithm("zf", red, la.PriorModel.ternary(0.5)),
    la.vp_algorithm("sic", red, la.PriorModel.ternary(0.5)),
)
grid = tuple(np.arange(30.0, 46.1, 4.0))
scen = la.VpScenario(m=8, n=8, big_m=32, snr_grid_db=grid, trials=TRIALS,
                     algorithms=algs, seed=17, threads=2)
curves = la.run_ser_sweep(scen)

print(f"m = n = 8, M = 32, {TRIALS} paired trials per point\n")
print("SNR(dB)".rjust(8) + "".join(f"{a.name:>14s}" for a in algs))
for snr in grid:
    row = f"{snr:8.1f}"
    for a in algs:
        row += f"{curves[a.name].points[snr].ser:14.4f}"
    print(row)

print("\nmean decoding flops per trial (reduction shared, not billed):")
for a in algs:
    print(f"  {a.name:14s} {curves[a.name].points[grid[0]].mean_flops:12.0f}")
