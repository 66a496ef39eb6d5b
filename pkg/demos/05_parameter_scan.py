"""Where do the two certificates hold?  A coarse map over (lambda1, eta1).

Run: python demos/05_parameter_scan.py
"""

import numpy as np

from fraxol import DiscreteSystem, feasible_region_scan
from fraxol.presets import existence_example, nonexistence_example

lams = np.round(np.linspace(0.01, 0.15, 8), 4)
etas = np.round(np.linspace(0.0, 0.8, 5), 4)

for name, make, mode in (("existence", existence_example, "existence"),
                         ("non-existence", nonexistence_example, "nonexistence")):
    system = DiscreteSystem.build(make())
    rows = feasible_region_scan(system, {"lambda1": lams, "eta1": etas}, mode)
    grid = {(r.lambdas[0], r.etas[0]): r.verdict != "inconclusive" for r in rows}
    print(f"{name} certificate ('#' = certified)")
    print("eta1 \\ lambda1 " + " ".join(f"{l:5.3f}" for l in lams))
    for e in etas:
        print(f"{e:14.2f}  " + " ".join("  #  " if grid[l, e] else "  .  " for l in lams))
    print()
