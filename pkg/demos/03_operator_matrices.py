"""
The operator pipeline behind the interpolant
============================================

Three matrices per dimension do all the work, built once per process:

  constraint  -- integer; polynomial coefficients -> corner constraints
  difference  -- exact dyadic rationals; samples  -> corner constraints
  fused       -- their exact composition; samples -> coefficients

This script inspects their structure and double-checks the fused route
against an independent dense solve.
"""

import numpy as np

from hyperspline import constraint_quantities, operator_set
from hyperspline.operators import export_csv

for dim in (3, 4):
    ops = operator_set(dim)
    n = ops.size
    print(f"\n=== dimension {dim}: {n} x {n} operators ===")
    qs = constraint_quantities(dim)
    print(f"{len(qs)} constraint quantities per corner:",
          ", ".join(q.label() for q in qs))

    c = ops.constraint
    print(f"constraint matrix: integer entries in "
          f"[{c.min()}, {c.max()}], {np.count_nonzero(c)} nonzero")
    print(f"exact inverse dtype: {ops.constraint_inv.dtype} "
          f"(integer entries in [{ops.constraint_inv.min()}, "
          f"{ops.constraint_inv.max()}])")

    nnz = len(ops.difference.entries)
    dens = ops.difference.to_dense()
    print(f"difference matrix: {nnz} exact rational nonzeros, "
          f"denominators up to {2 ** dim}")
    # rows for the plain value pass samples through; derivative rows are
    # zero-sum stencils
    sums = dens.sum(axis=1)
    print(f"row sums: {sorted(set(np.round(sums, 12)))}")

    # fused = inverse @ difference, composed in exact arithmetic
    a = ops.fused
    rng = np.random.default_rng(dim)
    x = rng.standard_normal(n)
    direct = a @ x
    two_step = np.linalg.solve(c.astype(float), dens @ x)
    print(f"fused vs dense-solve on random samples: "
          f"max diff {np.abs(direct - two_step).max():.2e}")

# everything is exportable for inspection or cross-checks
paths = export_csv(operator_set(3), "demo_output/operators_3d")
print("\nwrote 3D operator CSVs:")
for p in paths:
    print("  ", p)
