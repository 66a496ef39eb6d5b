"""The existence example: certify the hypotheses, then find the positive solution.

Run: python demos/03_existence.py
"""

import math

from fraxol import Box, DiscreteSystem, certify, newton_solve, parameter_boundary, picard_solve, verify_solution
from fraxol.presets import existence_example

system = DiscreteSystem.build(existence_example())
box = Box((0.5, 1.0))

v = certify(system, "existence")
print("verdict:", v.outcome)
for key, val in v.slacks.items():
    print(f"  {key:6s} slack {val:+.6f}" if val is not None else f"  {key:6s} unavailable")

lam = parameter_boundary(system.with_spec(system.spec.with_parameters(etas=(0.0, 0.5))), 0, "existence")
print(f"largest lambda1 with eta1 = 0: {lam:.10f}  (closed form {0.5 * math.sqrt(2) * math.gamma(1.25) ** 2 / (math.pi * math.e):.10f})")

pic = picard_solve(system, system.constant_state(box.rho), record=True)
print(f"\npicard from the box corner: {pic.iterations} iterations, residual {pic.residual:.1e}")
print("  residual every 5 steps:", " ".join(f"{r:.1e}" for r in pic.trajectory[::5]))
ok, diag = verify_solution(system, pic.final_state, box=box)
print(f"  verified={ok}, sup norms {diag['sup_norms']}, non-zero positive={diag['nonzero_positive']}")

new = newton_solve(system, system.constant_state(box.rho))
print(f"newton: {new.iterations} iterations, distance to picard {new.final_state.distance(pic.final_state):.1e}")
