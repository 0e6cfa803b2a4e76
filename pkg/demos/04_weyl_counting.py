"""Counting eigenvalues: the leading term, and how small the remainder is.

N(lambda) grows like (2 pi)^{-n} omega_n lambda^n |M|; what the remainder
does controls how uniformly eigenspaces spread over the manifold.  The flat
torus reduces to counting lattice points in disks, the circle's remainder
never exceeds 2, and single-eigenspace slices recover multiplicity / |M|.
"""

import numpy as np

import speclab as sl
import speclab.weyl as wl

torus = sl.FlatTorus2D()
basis = sl.torus_basis(torus, 200.0)
print(f"flat torus basis: {basis.size} eigenpairs up to lambda = 200")

scan = np.geomspace(10.0, 200.0, 48)
report = wl.counting_scan(basis, scan)
slope = wl.remainder_fit(report)
print("  lambda      N        leading    remainder")
for i in range(0, len(scan), 8):
    print(f"  {report.lambdas[i]:8.2f}  {report.counts[i]:7d}  {report.leading[i]:9.1f}"
          f"  {report.remainder[i]:+9.2f}")
print(f"fitted remainder exponent: {slope:.3f}  (the sharp global bound is 1)")

print("\ncircle: remainder is uniformly bounded")
circle = sl.circle_of_length(2 * np.pi)
cbasis = sl.circle_basis(circle, 300)
creport = wl.counting_scan(cbasis, np.geomspace(2.0, 290.0, 128))
print(f"  sup |N - leading| = {np.max(np.abs(creport.remainder)):.3f}")

print("\nper-eigenspace slice on the torus (lambda = sqrt(5)):")
grid = torus.build_grid(64)
defect = wl.homogeneity_defect(basis, np.sqrt(5.0), grid)
print(f"  multiplicity {defect.multiplicity}, gap parameter eps1 = {defect.eps1:.4f}")
print(f"  relative deviation from multiplicity/|M|: {defect.relative_deviation:.2e}")

print("\nhigher-dimensional difference expansion (n = 4, exact binomials):")
for k, a_factor, c_factor in wl.difference_expansion_terms(4):
    print(f"  lambda^{k}: {a_factor:+d} * a * eps1  {c_factor:+d} * c")
