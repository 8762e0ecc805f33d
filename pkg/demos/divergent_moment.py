"""A bounded-modular function family whose first moment diverges.

When a composer grows faster than every constant multiple of the gauge,
no finite moment bound survives: a sparse family of far-out balls keeps
the modular under 1 while the moment coordinate climbs without limit.
"""

from orliczval import (
    PolynomialComposer,
    PowerYoung,
    build_divergence_plan,
    check_cphi,
    divergent_truncation,
)

phi = PowerYoung(2.0)
xi = PolynomialComposer([0.0, 0.0, 0.0, 1.0])  # beta^4

print("=== growth certification ===")
rep = check_cphi(xi, phi)
print(f"certified dominated on the grid: {rep['certified_on_grid']}")
print(f"diverges at the large end: {rep['diverges_large_end']} "
      f"(ratio reaches {rep['sup_ratio']:.3e} at violation "
      f"{rep['violation']:.3e})")

print()
print("=== the construction, 12 terms ===")
plan = build_divergence_plan(xi, phi, 12, dim=2)
result = divergent_truncation(plan, 12)
print("  j  beta        center  radius      modular-cap  moment-sum  lower")
for row in result["rows"]:
    print(f"  {row['j']:2d}  {row['beta']:<10.4g}  {row['center']:6.0f}  "
          f"{row['radius']:<10.4g}  {2.0 ** -row['exponent']:<11.4g}  "
          f"{row['running_moment']:<10.4f}  "
          f"{row['running_lower_bound']:.4f}")

print()
print(f"modular of the 12-term function: {result['modular']:.6f} "
      f"<= cap {result['modular_bound']:.6f} <= 1")
print(f"first moment coordinate: {result['first_moment']:.4f} "
      f"(lower bound {result['lower_bound']:.4f})")
print("each term adds more than 0.8, so the truncations diverge linearly")

print()
print("=== the same at 50 terms ===")
plan = build_divergence_plan(xi, phi, 50, dim=2)
result = divergent_truncation(plan, 50)
print(f"modular {result['modular']:.6f} <= 1, "
      f"lower bound {result['lower_bound']:.2f} > 40")
