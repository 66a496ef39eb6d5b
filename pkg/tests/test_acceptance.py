"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.linalg import eigh
from scipy.special import gamma

from fraxol.certificates import EXISTENCE, NONEXISTENCE, bounds_from_spec, certify, parameter_boundary
from fraxol.exterior import ConstantData
from fraxol.geometry import BallDomain, build_grid
from fraxol.green import apply, assemble, solve_nonhomogeneous, spectral_radius, sup_norm_G1
from fraxol.kernel import (
    frac_laplacian_pointwise, green_kernel, normalization_constant, normalization_constant_numeric,
    torsion_closed_form,
)
from fraxol.model import Box, DiscreteSystem, cached_operator
from fraxol.presets import existence_example, nonexistence_example
from fraxol.solver import multistart_search, newton_solve, picard_solve, verify_solution

DISK = BallDomain(2, 1.0)
ORIGIN = np.zeros(2)
PE = math.pi * math.e
T14 = 1 / (math.sqrt(2) * gamma(1.25) ** 2)
T34 = 1 / (math.sqrt(8) * gamma(1.75) ** 2)

def _fresh(s, res):
    # bypasses the operator cache so the timings include assembly
    return assemble(build_grid(DISK, res), DISK, s)


@pytest.fixture
def verdict(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


def test_criterion_1_torsion_constants(verdict):
    t0 = time.perf_counter()
    printed = {0.25: 0.860682, 0.75: 0.418567}
    exact = {0.25: T14, 0.75: T34}
    errs = []
    ok = True
    for s in (0.25, 0.75):
        closed = float(torsion_closed_form(ORIGIN, DISK, s))
        ok &= abs(closed - exact[s]) <= 1e-12 and abs(closed - printed[s]) <= 1e-6
        op = _fresh(s, 64)
        centre = apply(op, np.ones(op.size))[op.grid.center_index]
        errs.append(abs(centre - closed))
    elapsed = time.perf_counter() - t0
    ok &= max(errs) <= 1e-3 and elapsed < 10
    verdict(1, ok, f"centre errors {errs[0]:.2e}, {errs[1]:.2e} at resolution 64; {elapsed:.1f} s")


def test_criterion_2_torsion_field(verdict):
    t0 = time.perf_counter()
    worst = {}
    for res in (32, 64):
        for s in (0.25, 0.5, 0.75):
            op = _fresh(s, res)
            x = op.grid.nodes
            mask = np.linalg.norm(x, axis=1) <= 0.8
            exact = torsion_closed_form(x[mask], DISK, s)
            worst[s, res] = float(np.max(np.abs(apply(op, np.ones(op.size))[mask] - exact) / exact))
    elapsed = time.perf_counter() - t0
    ok = all(worst[s, 32] <= 1e-2 and worst[s, 64] < worst[s, 32] for s in (0.25, 0.5, 0.75)) and elapsed < 30
    detail = "; ".join(f"s={s}: {worst[s, 32]:.2e} -> {worst[s, 64]:.2e}" for s in (0.25, 0.5, 0.75))
    verdict(2, ok, f"{detail}; {elapsed:.1f} s")


def test_criterion_3_harmonic_lift(verdict):
    errs = []
    for s in (0.25, 0.75):
        op = cached_operator(DISK, 32, s)
        u = solve_nonhomogeneous(op, 0.0, ConstantData(1.0))
        errs.append(float(np.max(np.abs(u - 1.0))))
    verdict(3, max(errs) <= 1e-6, f"max |u - 1| = {max(errs):.2e}")


def test_criterion_4_example_constants(verdict):
    b42 = bounds_from_spec(existence_example(), Box((0.5, 1.0)))
    b43 = bounds_from_spec(nonexistence_example(), Box((1.0, 1.0)))
    checks = [
        (b42.omega[0].lo, math.pi), (b42.omega[0].hi, PE), (b42.omega[1].lo, 0.0), (b42.omega[1].hi, 0.5),
        (b42.M[0], PE), (b42.M[1], 0.5), (b42.B_sup[0], 0.5), (b42.B_sup[1], 0.5),
        (b43.tau[0], PE), (b43.tau[1], 1.0), (b43.xi[0], 1.0), (b43.xi[1], 1.0),
    ]
    err = max(abs(a - b) for a, b in checks)
    sound = b42.omega[0].lo <= math.pi and b42.omega[0].hi >= PE and b42.M[0] >= PE and b43.tau[0] >= PE
    verdict(4, err <= 1e-12 and sound, f"max deviation {err:.1e} over {len(checks)} constants")


def test_criterion_5_certificate_regions(verdict):
    ex_exist = DiscreteSystem.build(existence_example())
    ex_nonexist = DiscreteSystem.build(nonexistence_example())
    certify(ex_exist, "existence")  # warm the eigenpair cache
    t0 = time.perf_counter()
    v42 = certify(ex_exist, "existence")
    at0 = ex_exist.with_spec(ex_exist.spec.with_parameters(etas=(0.0, 0.5)))
    lam_e = parameter_boundary(at0, 0, "existence")
    v43 = certify(ex_nonexist, "nonexistence")
    lam_n = parameter_boundary(ex_nonexist, 0, "nonexistence", norm_source="discrete")
    elapsed = time.perf_counter() - t0
    target_e = 0.5 * math.sqrt(2) * gamma(1.25) ** 2 / PE
    target_n = 1 / (PE * 0.860682)
    ok = (v42.outcome == EXISTENCE and v43.outcome == NONEXISTENCE and abs(lam_e - target_e) <= 1e-6
          and abs(lam_n - target_n) <= 1e-3 and elapsed < 5)
    verdict(5, ok, f"existence boundary {lam_e:.9f} (target {target_e:.9f}), "
                   f"non-existence flip {lam_n:.6f} (target {target_n:.6f}); {elapsed:.2f} s")


def test_criterion_6_nonexistence_multistart(verdict):
    t0 = time.perf_counter()
    ex_nonexist = DiscreteSystem.build(nonexistence_example())
    assert certify(ex_nonexist, "nonexistence").outcome == NONEXISTENCE
    reps = multistart_search(ex_nonexist, Box((1.0, 1.0)), n_starts=20, seed=0)
    elapsed = time.perf_counter() - t0
    worst = max(r.sup_norm for r in reps) if reps else math.inf
    verdict(6, bool(reps) and worst <= 1e-6 and elapsed < 120,
            f"{len(reps)} distinct solution(s), largest sup norm {worst:.1e}; {elapsed:.1f} s")


def test_criterion_7_existence_solution(verdict):
    t0 = time.perf_counter()
    ex_exist = DiscreteSystem.build(existence_example())
    box = Box((0.5, 1.0))
    pic = picard_solve(ex_exist, ex_exist.constant_state(box.rho))
    ok_fp, diag = verify_solution(ex_exist, pic.final_state, box=box)
    new = newton_solve(ex_exist, ex_exist.constant_state(box.rho))
    dist = new.final_state.distance(pic.final_state)
    elapsed = time.perf_counter() - t0
    ok = (pic.converged and pic.residual <= 1e-8 and ok_fp and max(diag["sup_norms"]) >= 1e-3
          and diag["within_box"] and pic.final_state.in_cone() and new.converged and dist <= 1e-6
          and elapsed < 120)
    verdict(7, ok, f"picard residual {pic.residual:.1e} in {pic.iterations} its, sup norms "
                   f"{diag['sup_norms'][0]:.4f}/{diag['sup_norms'][1]:.4f}, newton distance {dist:.1e}; {elapsed:.1f} s")


def test_criterion_8_property_suites(verdict):
    rng = np.random.default_rng(2024)
    fails = []

    # kernel symmetry and positivity on random pairs
    r = np.sqrt(rng.uniform(0, 1, (1000, 2))) * 0.999
    th = rng.uniform(0, 2 * math.pi, (1000, 2))
    x = np.column_stack([r[:, 0] * np.cos(th[:, 0]), r[:, 0] * np.sin(th[:, 0])])
    y = np.column_stack([r[:, 1] * np.cos(th[:, 1]), r[:, 1] * np.sin(th[:, 1])])
    for s in (0.25, 0.5, 0.75):
        gxy, gyx = green_kernel(x, y, DISK, s), green_kernel(y, x, DISK, s)
        if not (np.all(gxy > 0) and np.allclose(gxy, gyx, rtol=1e-12, atol=0)):
            fails.append(f"kernel s={s}")

    for s in (0.25, 0.75):
        op = cached_operator(DISK, 32, s)
        g1 = apply(op, np.ones(op.size))
        # positivity and domination
        for _ in range(100):
            f = rng.uniform(0, 1, op.size)
            u = apply(op, f)
            if u.min() < 0 or np.any(u > f.max() * g1 * (1 + 1e-12)):
                fails.append(f"domination s={s}")
                break
        # linearity
        f1, f2 = rng.standard_normal((2, op.size))
        a, b = rng.standard_normal(2)
        lin = apply(op, a * f1 + b * f2) - (a * apply(op, f1) + b * apply(op, f2))
        if np.max(np.abs(lin)) > 1e-12 * (1 + np.max(np.abs(apply(op, np.abs(a * f1) + np.abs(b * f2))))):
            fails.append(f"linearity s={s}")
        # eigenpair and dense oracle
        pair = spectral_radius(op)
        if pair.residual > 1e-8 or pair.eigenfunction.min() < -1e-10 or pair.spectral_radius > sup_norm_G1(op) + 1e-10:
            fails.append(f"eigenpair s={s}")
        sw = np.sqrt(op.grid.weights)
        S = op.matrix / op.grid.weights[None, :] * sw[:, None] * sw[None, :]
        top = eigh((S + S.T) / 2, eigvals_only=True, subset_by_index=[op.size - 1, op.size - 1])[0]
        if abs(top - pair.spectral_radius) > 1e-6:
            fails.append(f"dense oracle s={s}")

    for s in (0.25, 0.5, 0.75):
        c, cn = normalization_constant(2, s), normalization_constant_numeric(2, s)
        if abs(c - cn) > 1e-6 * c:
            fails.append(f"c_n,s s={s}")
        if abs(frac_laplacian_pointwise(ConstantData(1.0), np.array([0.3, 0.1]), s)) > 1e-8:
            fails.append(f"laplacian of constant s={s}")

    verdict(8, not fails, "all property suites hold" if not fails else "failed: " + ", ".join(fails))


def _cli(args, out):
    cmd = [sys.executable, "-m", "fraxol.cli", *args, "--out", str(out)]
    done = subprocess.run(cmd, capture_output=True, text=True)
    return done.returncode, {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_criterion_9_determinism(verdict, tmp_path):
    configs = [
        ["example", "existence", "--solve", "--certify"],
        ["example", "nonexistence", "--solve", "--method", "multistart", "--n-starts", "8", "--seed", "5"],
        ["spectrum", "--s", "0.25"],
    ]
    same = True
    count = 0
    for k, args in enumerate(configs):
        code_a, files_a = _cli(args, tmp_path / f"a{k}")
        code_b, files_b = _cli(args, tmp_path / f"b{k}")
        same &= code_a == code_b == 0 and files_a == files_b and bool(files_a)
        count += len(files_a)
    verdict(9, same, f"{count} report files byte-identical across two runs")
