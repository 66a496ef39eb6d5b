"""Discrete Green operator on the unit disk versus the closed-form torsion function.

Run: python demos/01_torsion_and_spectrum.py
"""

import numpy as np

from fraxol import BallDomain, apply, build_grid, spectral_radius, sup_norm_G1, torsion_closed_form
from fraxol.green import assemble

disk = BallDomain(2, 1.0)

print("s     res   N     G(1)(0)      exact        max rel err (|x|<=0.8)")
for s in (0.25, 0.5, 0.75):
    exact0 = float(torsion_closed_form(np.zeros(2), disk, s))
    for res in (16, 32, 64):
        op = assemble(build_grid(disk, res), disk, s)
        u = apply(op, np.ones(op.size))
        x = op.grid.nodes
        inner = np.linalg.norm(x, axis=1) <= 0.8
        ref = torsion_closed_form(x[inner], disk, s)
        rel = np.max(np.abs(u[inner] - ref) / ref)
        print(f"{s:<5} {res:<5} {op.size:<5} {u[0]:.8f}   {exact0:.8f}   {rel:.2e}")

# r(G) is bounded by the sup norm of the torsion vector.
print()
for s in (0.25, 0.75):
    op = assemble(build_grid(disk, 32), disk, s)
    pair = spectral_radius(op)
    print(f"s={s}: r(G) = {pair.spectral_radius:.6f} <= |G(1)| = {sup_norm_G1(op):.6f}, mu = {pair.mu:.6f}, "
          f"{pair.iterations} power iterations")
