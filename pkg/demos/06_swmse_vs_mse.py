"""How the square-weighted loss relates to the MSE it stands in for.

With group-1 share rho and standard-deviation ratio gamma between the groups,
the two losses differ by a closed-form factor. The factor is 1 only for
degenerate splits; a minimum-share constraint pins rho away from the ends,
which tightens the min/max envelope of the factor and so keeps the surrogate
loss honest. With equal group variances the factor is 2(rho-1/2)^2 + 1/2,
which favors balanced splits at equal MSE.
"""

import numpy as np

from qubosplit import swmse_mse_ratio

print("ratio at selected (rho, gamma):")
for rho, gamma in [(0.5, 1.0), (0.2, 1.0), (0.8, 1.0), (0.5, 0.5), (0.5, 2.0), (1.0, 1.3)]:
    print(f"  rho={rho:.1f} gamma={gamma:.1f} -> {swmse_mse_ratio(rho, gamma):.4f}")

gammas = np.linspace(0.5, 2.0, 121)[1:-1]
rho_grid = np.linspace(0.0025, 0.9975, 399)
print("\nenvelope of the ratio over 0.5 < gamma < 2.0, rho in [a, 1-a]:")
print("  a     min      max")
rows = []
for a in (0.0, 0.1, 0.2, 0.3, 0.4):
    rhos = rho_grid[(rho_grid >= a) & (rho_grid <= 1 - a)]
    values = [swmse_mse_ratio(r, g) for r in rhos for g in gammas]
    rows.append((a, min(values), max(values)))
    print(f"  {a:.1f}  {min(values):.4f}  {max(values):.4f}")

print("\nthe interval narrows as the minimum split ratio grows:",
      all(b[1] >= a[1] and b[2] <= a[2] for a, b in zip(rows, rows[1:])))

print("\nequal-variance identity check (factor = 2(rho-1/2)^2 + 1/2):")
for rho in (0.2, 0.4, 0.6):
    lhs = swmse_mse_ratio(rho, 1.0)
    rhs = 2 * (rho - 0.5) ** 2 + 0.5
    print(f"  rho={rho:.1f}: ratio={lhs:.4f}, identity={rhs:.4f}, equal={np.isclose(lhs, rhs)}")
