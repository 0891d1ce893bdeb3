"""Run the verification suites programmatically and summarize the report.

Equivalent to `hardylab verify all`, but driving the suite registry
directly so the fitted quantities can be inspected in Python.
"""

import time

from hardylab import SUITES, SuiteConfig

cfg = SuiteConfig()  # N=3, mu=2, 1024 cells, grading 3, seeded

print(f"config: N={cfg.dimension}, mu={cfg.mu}, cells={cfg.cells}, "
      f"seed={cfg.seed}")
print()
for name, suite in SUITES.items():
    t0 = time.perf_counter()
    rep = suite(cfg)
    wall = time.perf_counter() - t0
    status = "PASS" if rep.passed else "FAIL"
    print(f"{status} {name} ({wall:.2f} s)")
    for label, value in rep.fitted:
        print(f"      {label} = {value:.6g}")
    for note in rep.notes:
        print(f"      note: {note}")
