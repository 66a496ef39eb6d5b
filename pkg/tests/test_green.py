import math

import numpy as np
import pytest
from scipy.linalg import eigh

from fraxol.exterior import ConstantData, GaussianData, PowerCapData
from fraxol.geometry import BallDomain, build_grid
from fraxol.green import apply, assemble, solve_nonhomogeneous, spectral_radius, sup_norm_G1
from fraxol.kernel import frac_laplacian_pointwise, torsion_closed_form, torsion_constant

ORDERS = [0.25, 0.5, 0.75]


def _torsion_errors(op):
    g = op.grid
    exact = torsion_closed_form(g.nodes, g.domain, op.order)
    mask = np.linalg.norm(g.nodes, axis=1) <= 0.8
    rel = np.abs(apply(op, np.ones(g.size)) - exact) / exact
    return rel[mask].max()


@pytest.mark.parametrize("s", ORDERS)
def test_entries_nonnegative_and_weighted_symmetric(op_factory, s):
    op = op_factory(s)
    K, w = op.matrix, op.grid.weights
    assert K.min() >= 0
    G = K / w[None, :]
    off = ~np.eye(op.size, dtype=bool)
    assert np.allclose(G[off], G.T[off], rtol=1e-10, atol=0)


@pytest.mark.parametrize("s", ORDERS)
def test_torsion_field_at_resolution_32(op_factory, s):
    assert _torsion_errors(op_factory(s)) <= 1e-2


@pytest.mark.parametrize("s,value", [(0.25, 0.860682), (0.75, 0.418567), (0.5, 2 / math.pi)])
def test_sup_norm_G1(op_factory, s, value):
    assert sup_norm_G1(op_factory(s)) == pytest.approx(value, abs=1e-3)


def test_disk_correction_is_cruder_but_valid(grid32):
    # the equal-area disk diagonal is kept as an option; it converges like h^(2s)
    disk = assemble(grid32, s=0.5, correction="disk")
    sub = assemble(grid32, s=0.5)
    assert disk.correction == "disk" and disk.matrix.min() >= 0
    assert _torsion_errors(sub) < _torsion_errors(disk) < 0.1
    off = ~np.eye(grid32.size, dtype=bool)
    assert np.array_equal(disk.matrix[off], sub.matrix[off])


def test_assemble_rejects_bad_input(grid32):
    with pytest.raises(ValueError):
        assemble(grid32, BallDomain(2, 2.0), 0.5)
    with pytest.raises(ValueError):
        assemble(grid32, s=1.2)
    with pytest.raises(ValueError):
        assemble(grid32, s=0.5, correction="none")


def test_apply_linear_positive_and_dominated(op_factory, rng):
    op = op_factory(0.25)
    one = apply(op, np.ones(op.size))
    assert np.array_equal(apply(op, np.zeros(op.size)), np.zeros(op.size))
    for _ in range(100):
        f = rng.normal(size=op.size)
        g = rng.normal(size=op.size)
        a, b = rng.normal(size=2)
        u = apply(op, f)
        assert np.all(np.abs(u) <= np.abs(f).max() * one * (1 + 1e-12))
        assert np.all(apply(op, np.abs(f)) >= 0)
        lin = apply(op, a * f + b * g) - (a * u + b * apply(op, g))
        assert np.abs(lin).max() <= 1e-13 * (abs(a) + abs(b)) * np.abs(one).max() * 10
    with pytest.raises(ValueError):
        apply(op, np.ones(op.size + 1))


@pytest.mark.parametrize("s", ORDERS)
def test_eigenpair(op_factory, s):
    op = op_factory(s)
    pair = spectral_radius(op, tol=1e-10)
    assert pair.spectral_radius > 0 and pair.mu == pytest.approx(1 / pair.spectral_radius)
    assert pair.residual <= 1e-8
    assert pair.eigenfunction.min() >= -1e-10
    assert np.abs(pair.eigenfunction).max() == pytest.approx(1.0)
    assert pair.spectral_radius <= sup_norm_G1(op) + 1e-10
    # dense oracle: K = G W is similar to the symmetric W^(1/2) G W^(1/2)
    sw = np.sqrt(op.grid.weights)
    S = sw[:, None] * op.matrix / sw[None, :]
    S = 0.5 * (S + S.T)
    top = eigh(S, eigvals_only=True, subset_by_index=[op.size - 1, op.size - 1])[0]
    assert pair.spectral_radius == pytest.approx(top, rel=1e-6)


def test_half_order_eigenvalue_near_known_value(op_factory):
    # first eigenvalue of the half Laplacian on the unit disk is about 2.0048
    assert spectral_radius(op_factory(0.5)).mu == pytest.approx(2.0048, rel=2e-2)


def test_spectral_radius_reports_exhaustion(op_factory):
    with pytest.raises(RuntimeError):
        spectral_radius(op_factory(0.25), tol=1e-14, max_iter=3)
    with pytest.raises(ValueError):
        spectral_radius(op_factory(0.25), tol=0.0)


@pytest.mark.parametrize("s", [0.25, 0.75])
def test_harmonic_lift_of_constant(op_factory, s):
    op = op_factory(s)
    assert np.abs(solve_nonhomogeneous(op, 0.0, ConstantData(1.0)) - 1.0).max() <= 1e-6


def test_zero_exterior_reduces_to_apply(op_factory, rng):
    op = op_factory(0.5)
    f = rng.uniform(size=op.size)
    assert np.array_equal(solve_nonhomogeneous(op, f, ConstantData(0.0)), apply(op, f))


def test_superposition_with_constant_data(op_factory):
    op = op_factory(0.75)
    g = op.grid
    u = solve_nonhomogeneous(op, 1.0, ConstantData(0.4))
    exact = torsion_closed_form(g.nodes, g.domain, 0.75) + 0.4
    mask = np.linalg.norm(g.nodes, axis=1) <= 0.8
    assert np.abs(u - exact)[mask].max() <= 1e-2


@pytest.mark.slow
def test_nonconstant_lift_reproduces_exterior_torsion_profile():
    # zeta = torsion profile of the ball of radius 2: (-Delta)^s zeta = 1 on the unit disk,
    # so solving with f = 1 must return zeta itself
    s = 0.5
    op = assemble(build_grid(BallDomain(), 16), s=s)
    zeta = PowerCapData(torsion_constant(2, s), 2.0, s)
    u = solve_nonhomogeneous(op, 1.0, zeta)
    r = np.linalg.norm(op.grid.nodes, axis=1)
    assert np.abs(u - zeta.value(r)).max() <= 1e-8


@pytest.mark.slow
def test_harmonic_lift_positive_for_gaussian_data():
    op = assemble(build_grid(BallDomain(), 16), s=0.25)
    gamma = solve_nonhomogeneous(op, 0.0, GaussianData(1.0, 1.5, 0.0))
    assert gamma.min() >= -1e-8
