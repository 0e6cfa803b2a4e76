"""A circle with a lopsided metric is still, secretly, a round circle.

The metric (2 + sin x) dx^2 on [-pi, pi) looks inhomogeneous, but the
arc-length change of variables flattens it to a standard circle of length
L = integral of sqrt(2 + sin t).  Every eigenspace density then comes out
exactly constant: multiplicity / L at every point.
"""

import numpy as np

import speclab as sl

profile = sl.sine_profile()          # h(t) = 2 + sin t
circle = sl.Circle1D(profile)
grid = circle.default_grid()

print(f"metric coefficient: h = {profile.name}")
print(f"circumference L = {circle.length:.12f}")
print(f"quadrature total = {grid.total_weight():.12f}  (should equal L)")

rep = circle.reparam
xs = np.linspace(-np.pi, np.pi, 9)
print("\n  x        s(x)      x(s(x))")
for x in xs:
    s = float(rep.s_of_x(x))
    back = float(rep.x_of_s(s))
    print(f"{x:+.4f}  {s:8.4f}  {back:+.12f}")

basis = sl.circle_basis(circle, 8)
print("\neigenvalues come in pairs 2*pi*n/L:")
print("  ", np.round(basis.lams[:7], 6))

print("\neigenspace density (should be multiplicity / L everywhere):")
for group in (1, 2, 3):
    idx = basis.group_indices(group)
    density = basis.abs2_sum(idx, grid.points)
    print(f"  |n| = {group}: density in [{density.min():.12f}, {density.max():.12f}],"
          f" 2/L = {2 / circle.length:.12f}")
