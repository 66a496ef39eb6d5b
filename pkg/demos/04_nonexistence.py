"""The non-existence example: certificate plus a multistart search that finds only zero.

Run: python demos/04_nonexistence.py
"""

from fraxol import Box, DiscreteSystem, certify, multistart_search, parameter_boundary
from fraxol.presets import nonexistence_example

system = DiscreteSystem.build(nonexistence_example())

v = certify(system, "nonexistence")
print("verdict:", v.outcome, {k: round(s, 6) for k, s in v.slacks.items()})
for source in ("analytic", "discrete"):
    print(f"lambda1 flip ({source} norms): {parameter_boundary(system, 0, 'nonexistence', norm_source=source):.6f}")

reps = multistart_search(system, Box((1.0, 1.0)), n_starts=20, seed=0)
print(f"\n{len(reps)} distinct converged solution(s) from 20 starts")
for r in reps:
    print(f"  start={r.start:10s} method={r.method:6s} sup norm {r.sup_norm:.1e} residual {r.residual:.1e}")

# Well past the flip the certificate is silent and a non-zero solution shows up.
big = system.with_spec(system.spec.with_parameters(lambdas=(3.0, 1.0)))
print("\nlambda1 = 3:", certify(big, "nonexistence").outcome,
      "| largest solution found:", max(r.sup_norm for r in multistart_search(big, Box((1.0, 1.0)), 8)))
