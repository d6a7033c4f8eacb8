#!/usr/bin/env python3
"""The full identity-residual suite on one spray, as a library call.

Every asserted identity becomes a row with a worst-case relative residual
and a tolerance; rows whose hypotheses fail on the sample are marked not
applicable instead of passing vacuously.  The same suite backs the
``spraylab verify`` command, which adds deterministic JSON reports.
"""

from spraylab import verify
from spraylab.spray_core import make_family, sample_points

sp = make_family("sphere", n=3, kappa=1.0)
pts = sample_points(sp, 10, seed=2024)
rows = verify.run_suite(sp, pts)

width = max(len(r.id) for r in rows) + 2
print(f"{sp.label}, {len(pts)} points\n")
print(f"{'identity':<{width}}{'max residual':>14}{'tolerance':>12}  status")
print("-" * (width + 36))
for r in rows:
    if r.passed is None:
        print(f"{r.id:<{width}}{'-':>14}{r.tolerance:>12.0e}  n/a "
              f"({r.note})")
    else:
        status = "pass" if r.passed else "FAIL"
        print(f"{r.id:<{width}}{r.max_residual:>14.3e}{r.tolerance:>12.0e}  "
              f"{status}")

bad = [r for r in rows if r.passed is False]
print(f"\n{len(rows)} rows, {len(bad)} failures")
print("\nsame thing from the command line:")
print("  spraylab verify --spray 'sphere(n=3,kappa=1)' --points 50 --seed 0")
print("  spraylab verify --file my_spray.txt --format text")
