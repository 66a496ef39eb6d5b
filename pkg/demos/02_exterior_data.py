"""Harmonic lifts: (-Delta)^s u = f in the disk with prescribed exterior data.

Constant exterior data is reproduced exactly.  A Gaussian profile needs the
pointwise fractional Laplacian of the data, which is the slow part.

Run: python demos/02_exterior_data.py
"""

import numpy as np

from fraxol import BallDomain, ConstantData, GaussianData, frac_laplacian_pointwise
from fraxol.model import cached_operator
from fraxol.green import solve_nonhomogeneous

disk = BallDomain(2, 1.0)
op = cached_operator(disk, 16, 0.5)

u = solve_nonhomogeneous(op, 0.0, ConstantData(1.0))
print(f"zeta = 1: max |u - 1| = {np.max(np.abs(u - 1)):.1e}")

bump = GaussianData(amplitude=1.0, width=1.5, background=0.0)
print(f"(-Delta)^(1/2) of the Gaussian at the origin: {frac_laplacian_pointwise(bump, np.zeros(2), 0.5):.8f}")

u = solve_nonhomogeneous(op, 0.0, bump)
r = np.linalg.norm(op.grid.nodes, axis=1)
for k in range(0, op.grid.ring.max() + 1, 2):
    sel = op.grid.ring == k
    print(f"  |x| = {r[sel][0]:.3f}: u = {u[sel].mean():.6f}, zeta there = {bump.value(r[sel][0]):.6f}")
