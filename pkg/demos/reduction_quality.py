"""How much do the four reduction algorithms improve a bad basis?

Draws inverse-Gaussian bases (the precoding ensemble: columns of inv(B) are
highly correlated), reduces each with LLL, boosted LLL, KZ and boosted KZ,
and tabulates the lattice quality metrics next to the closed-form
orthogonality-defect bounds.
"""

import numpy as np

import latticeamp as la

N = 8
TRIALS = 40
SEED = 1

methods = [
    ("LLL", la.ReductionMethod.lll()),
    ("b-LLL", la.ReductionMethod.blll()),
    ("KZ", la.ReductionMethod.kz()),
    ("b-KZ", la.ReductionMethod.bkz_boosted()),
]

rows = {name: [] for name, _ in methods}
before = []
rng = np.random.default_rng(SEED)
for _ in range(TRIALS):
    a = rng.standard_normal((N, N))
    while abs(np.linalg.det(a)) < 1e-6:
        a = rng.standard_normal((N, N))
    basis = la.LatticeBasis(np.linalg.inv(a))
    before.append((la.orthogonality_defect(basis), la.coherence(basis),
                   la.small_factor(basis)))
    for name, method in methods:
        out = la.reduce_basis(basis, method)
        rows[name].append((out.od_after, la.coherence(out.reduced),
                           la.small_factor(out.reduced), out.swap_count))

print(f"inverse-Gaussian ensemble, n = {N}, {TRIALS} trials\n")
print(f"{'':10s} {'mean OD':>10s} {'OD bound':>10s} {'coherence':>10s} {'small':>8s}")
od_b, coh_b, s_b = np.mean(before, axis=0)
print(f"{'before':10s} {od_b:10.3f} {'-':>10s} {coh_b:10.3f} {s_b:8.3f}")
for name, method in methods:
    od, coh, small, swaps = np.mean(rows[name], axis=0)
    print(f"{name:10s} {od:10.3f} {la.od_bound(method, N):10.1f} {coh:10.3f} {small:8.3f}")

print("\nEvery reduced defect sits far below its worst-case bound, and the")
print("boosted variants never lengthen a column relative to their bases:")
out_l = la.lll_reduce(basis)
out_b = la.blll_reduce(basis)
print("  last trial column norms, LLL  :", np.round(out_l.reduced.col_norms, 3))
print("  last trial column norms, b-LLL:", np.round(out_b.reduced.col_norms, 3))
