"""Ball domains and their quadrature grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class BallDomain:
    """The open ball of radius ``radius`` centred at the origin of R^dim."""

    dim: int = 2
    radius: float = 1.0

    def __post_init__(self):
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim < 2:
            raise ValueError(f"dim must be an integer >= 2, got {self.dim!r}")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius!r}")

    def contains(self, x) -> bool:
        """Strict membership in the open ball."""
        return float(np.dot(x, x)) < self.radius**2


def ball_volume(domain: BallDomain) -> float:
    n, r = domain.dim, domain.radius
    return math.pi ** (n / 2) * r**n / math.gamma(n / 2 + 1)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes strictly inside the ball with positive weights.

    Node 0 is the centre; it owns the central ball of radius ``h/2``.  Every
    other node belongs to one of ``rings`` concentric shells of width ``h``.

    Attributes
    ----------
    nodes : (N, dim) array
    weights : (N,) array
        Measure of each node's cell; the cells partition the ball.
    cell_radius : (N,) array
        Radius of the ball with the same measure as the node's cell.
    ring : (N,) int array
        Shell index of every node (0 for the centre).
    ring_radius : (rings + 1,) array
        Distance of the nodes of each shell from the origin.
    """

    domain: BallDomain
    resolution: int
    spacing: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    cell_radius: np.ndarray = field(repr=False)
    ring: np.ndarray = field(repr=False)
    ring_radius: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def center_index(self) -> int:
        return 0

    def nearest_node(self, point) -> int:
        p = np.asarray(point, dtype=float)
        return int(np.argmin(((self.nodes - p) ** 2).sum(axis=1)))

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def build_grid(domain: BallDomain, resolution: int) -> QuadratureGrid:
    """Build the polar quadrature grid of ``domain``.

    ``resolution`` is the number of cells along a diameter (rounded down to an
    odd number): the grid has ``resolution // 2`` shells around a central cell
    and spacing ``h = r / (resolution // 2 + 1/2)``.  Each shell gets about
    ``shell_measure / h**n`` nodes, so cells are roughly square.  Node radii
    are the root-mean-square radius of their shell, which makes the rule exact
    on every shell for functions affine in ``|x|**2``; only the central cell
    contributes an error, of order ``h**(n+2)``.

    For n = 2 the shell nodes sit at equally spaced angles; for n = 3 on a
    Fibonacci sphere; for n >= 4 on a fixed pseudo-random sphere sample.
    """
    if isinstance(resolution, bool) or not isinstance(resolution, (int, np.integer)):
        raise TypeError(f"resolution must be an integer, got {resolution!r}")
    if resolution < 4:
        raise ValueError(f"resolution must be >= 4, got {resolution}")
    if domain.dim < 2:
        raise ValueError("dim must be >= 2")
    n, r = domain.dim, domain.radius
    rings = int(resolution) // 2
    h = r / (rings + 0.5)
    unit = math.pi ** (n / 2) / math.gamma(n / 2 + 1)

    nodes = [np.zeros((1, n))]
    weights = [np.array([unit * (h / 2) ** n])]
    ring_id = [np.zeros(1, dtype=int)]
    ring_radius = [0.0]
    for k in range(1, rings + 1):
        a, b = (k - 0.5) * h, (k + 0.5) * h
        measure = unit * (b**n - a**n)
        rho = math.sqrt(n / (n + 2) * (b ** (n + 2) - a ** (n + 2)) / (b**n - a**n))
        count = max(1, int(round(measure / h**n)))
        nodes.append(rho * _sphere_points(n, count, k))
        weights.append(np.full(count, measure / count))
        ring_id.append(np.full(count, k, dtype=int))
        ring_radius.append(rho)

    nodes = np.vstack(nodes)
    weights = np.concatenate(weights)
    cell_radius = (weights / unit) ** (1.0 / n)
    arrays = [nodes, weights, cell_radius, np.concatenate(ring_id), np.array(ring_radius)]
    for arr in arrays:
        arr.flags.writeable = False
    return QuadratureGrid(domain, int(resolution), h, *arrays)


def _sphere_points(n: int, count: int, shell: int) -> np.ndarray:
    if n == 2:
        theta = (np.arange(count) + 0.5) * (2 * math.pi / count)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if n == 3:
        i = np.arange(count)
        zc = 1.0 - (2 * i + 1) / count
        rc = np.sqrt(1.0 - zc**2)
        phi = i * _GOLDEN_ANGLE
        return np.column_stack([rc * np.cos(phi), rc * np.sin(phi), zc])
    rng = np.random.default_rng(1000 * n + shell)
    pts = rng.standard_normal((count, n))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)
