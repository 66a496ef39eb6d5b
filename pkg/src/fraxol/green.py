"""Nystrom discretisation of the Green operator of ``(-Delta)^s`` on a ball."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from fraxol.exterior import ExteriorData
from fraxol.geometry import BallDomain, QuadratureGrid, _sphere_points
from fraxol.kernel import (
    QuadControl,
    check_order,
    frac_laplacian_pointwise,
    green_kernel,
    green_regular_diagonal,
    riesz_constant,
    riesz_potential_ball,
)

CORRECTIONS = ("subtraction", "disk")
_ROW_CHUNK = 256


@dataclass(frozen=True, eq=False)
class DiscreteGreenOperator:
    """Dense matrix ``K`` with ``(K f)_i ~ int_B G(x_i, y) f(y) dy``.

    Off-diagonal entries are ``w_j G(x_i, x_j)``.  The diagonal carries the
    integral of the kernel over the node's own cell, computed according to
    ``correction``.
    """

    grid: QuadratureGrid
    order: float
    matrix: np.ndarray = field(repr=False)
    correction: str = "subtraction"

    @property
    def resolution(self) -> int:
        return self.grid.resolution

    @property
    def domain(self) -> BallDomain:
        return self.grid.domain

    @property
    def size(self) -> int:
        return self.grid.size

    @cached_property
    def G1(self) -> np.ndarray:
        """The operator applied to the constant 1."""
        out = self.matrix.sum(axis=1)
        out.flags.writeable = False
        return out

    @property
    def metadata(self) -> dict:
        return {"s": self.order, "resolution": self.resolution, "nodes": self.size, "correction": self.correction}


@dataclass(frozen=True)
class EigenPair:
    spectral_radius: float
    mu: float
    eigenfunction: np.ndarray = field(repr=False)
    residual: float
    iterations: int


def assemble(grid: QuadratureGrid, domain: BallDomain | None = None, s: float = 0.5,
             correction: str = "subtraction") -> DiscreteGreenOperator:
    """Assemble the Nystrom matrix of the Green operator on ``grid``.

    With ``correction="subtraction"`` (the default) the diagonal is chosen so
    that each row integrates the whole-space kernel ``Phi`` exactly:
    ``K_ii = int_B Phi(x_i - y) dy - sum_{j != i} w_j Phi_ij - w_i H(x_i, x_i)``,
    where ``H = Phi - G`` is the smooth regular part.  ``correction="disk"``
    instead integrates ``G`` over the ball of measure ``w_i`` around ``x_i``,
    which converges only like ``h^(2s)``.

    Raises
    ------
    ValueError
        If the grid belongs to another domain, or an entry comes out negative
        or non-finite.
    """
    s = check_order(s)
    if domain is None:
        domain = grid.domain
    if domain != grid.domain:
        raise ValueError("grid was built on a different domain")
    if correction not in CORRECTIONS:
        raise ValueError(f"correction must be one of {CORRECTIONS}, got {correction!r}")
    x, w = grid.nodes, grid.weights
    n, N = domain.dim, grid.size
    K = np.empty((N, N))
    phi_rows = np.empty(N)
    cphi = riesz_constant(n, s)
    for start in range(0, N, _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, N)
        xi = x[start:stop, None, :]
        block = green_kernel(xi, x[None, :, :], domain, s)
        d2 = ((xi - x[None, :, :]) ** 2).sum(axis=-1)
        rows = np.arange(start, stop)
        block[rows - start, rows] = 0.0
        d2[rows - start, rows] = 1.0
        phi = cphi * d2 ** (s - n / 2)
        phi[rows - start, rows] = 0.0
        phi_rows[start:stop] = phi @ w
        K[start:stop] = block * w
    if correction == "subtraction":
        potential = np.array([riesz_potential_ball(rho, domain, s) for rho in grid.ring_radius])
        radius = np.linalg.norm(x, axis=1)
        diag = potential[grid.ring] - phi_rows - w * green_regular_diagonal(radius, domain, s)
    else:
        diag = _disk_diagonal(grid, s)
    K[np.diag_indices(N)] = diag
    if not np.all(np.isfinite(K)) or K.min() < 0:
        raise ValueError("assembled Green matrix has negative or non-finite entries")
    K.flags.writeable = False
    return DiscreteGreenOperator(grid, s, K, correction)


def _disk_diagonal(grid: QuadratureGrid, s: float, radial: int = 24, angular: int = 32) -> np.ndarray:
    # int over |z| < a of G(x, x+z) dz, in polar form with t = a u^(1/(2s))
    n = grid.domain.dim
    u, wu = np.polynomial.legendre.leggauss(radial)
    u, wu = (u + 1) / 2, wu / 2
    dirs = _sphere_points(n, angular if n == 2 else angular * 4, 0)
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    out = np.empty(grid.size)
    for i, (xi, a) in enumerate(zip(grid.nodes, grid.cell_radius)):
        t = a * u ** (1 / (2 * s))
        pts = xi + t[:, None, None] * dirs[None]
        g = green_kernel(xi, pts, grid.domain, s)
        vals = t[:, None] ** (n - 2 * s) * g
        out[i] = a ** (2 * s) / (2 * s) * area * (wu[:, None] * vals).mean(axis=1).sum()
    return out


def apply(op: DiscreteGreenOperator, f) -> np.ndarray:
    """Grid values of the solution with right-hand side ``f`` and zero exterior data."""
    f = np.asarray(f, dtype=float)
    if f.shape[0] != op.size:
        raise ValueError(f"expected {op.size} node values, got shape {f.shape}")
    return op.matrix @ f


def sup_norm_G1(op: DiscreteGreenOperator) -> float:
    return float(op.G1.max())


def spectral_radius(op: DiscreteGreenOperator, tol: float = 1e-10, max_iter: int = 10_000) -> EigenPair:
    """Principal eigenpair by power iteration from the constant vector.

    ``K = G W`` with ``G`` symmetric, so the Rayleigh quotient is taken in the
    ``W``-weighted inner product, where ``K`` is self-adjoint.

    Raises
    ------
    RuntimeError
        If the residual ``|K phi - r phi|_inf`` is still above ``tol`` after
        ``max_iter`` steps.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    K, w = op.matrix, op.grid.weights
    phi = np.ones(op.size)
    kphi = K @ phi
    res = math.inf
    for it in range(1, max_iter + 1):
        r = float((w * phi) @ kphi / ((w * phi) @ phi))
        res = float(np.abs(kphi - r * phi).max())
        if res <= tol:
            return EigenPair(r, 1.0 / r, phi, res, it)
        phi = kphi / np.abs(kphi).max()
        kphi = K @ phi
    raise RuntimeError(f"power iteration did not reach tol={tol:g} in {max_iter} steps (residual {res:.3g})")


def solve_nonhomogeneous(op: DiscreteGreenOperator, f, zeta: ExteriorData,
                         quad: QuadControl = QuadControl()) -> np.ndarray:
    """Node values of the solution of ``(-Delta)^s u = f`` in the ball, ``u = zeta`` outside.

    Uses ``u = G(f - (-Delta)^s zeta) + zeta``.  The profile is radial, so
    its fractional Laplacian is evaluated once per shell radius.
    """
    grid = op.grid
    f = np.broadcast_to(np.asarray(f, dtype=float), (grid.size,))
    if zeta.is_constant():
        lap = np.zeros(grid.size)
    else:
        n = grid.domain.dim
        per_ring = np.array([frac_laplacian_pointwise(zeta, np.r_[rho, np.zeros(n - 1)], op.order, quad)
                             for rho in grid.ring_radius])
        lap = per_ring[grid.ring]
    radius = np.linalg.norm(grid.nodes, axis=1)
    return apply(op, f - lap) + zeta.value(radius)
