import numpy as np
import pytest

from fraxol.model import Box, State, apply_T, residual
from fraxol.solver import multistart_search, newton_solve, picard_solve, starting_states, verify_solution, worker_count


@pytest.fixture(scope="module")
def corner_solution(ex_exist):
    return picard_solve(ex_exist, ex_exist.constant_state([0.5, 1.0]))


def test_picard_converges_on_existence_example(ex_exist, corner_solution):
    rep = corner_solution
    assert rep.converged and rep.residual <= 1e-8
    assert rep.residual == residual(ex_exist, rep.final_state)
    ok, diag = verify_solution(ex_exist, rep.final_state, box=Box((0.5, 1.0)))
    assert ok and diag["nonzero_positive"] and diag["within_box"]
    assert diag["sup_norms"][0] >= 1e-3


def test_newton_agrees_with_picard(ex_exist, corner_solution):
    rep = newton_solve(ex_exist, ex_exist.constant_state([0.5, 1.0]))
    assert rep.converged and rep.iterations < 20
    assert rep.final_state.distance(corner_solution.final_state) <= 1e-6


def test_newton_from_fixed_point_is_immediate(ex_exist, corner_solution):
    rep = newton_solve(ex_exist, corner_solution.final_state)
    assert rep.converged and rep.iterations == 0


def test_picard_trajectory_and_budget(ex_exist):
    rep = picard_solve(ex_exist, ex_exist.constant_state([0.5, 1.0]), max_iter=3, record=True)
    assert not rep.converged and rep.iterations == 3
    assert len(rep.trajectory) == 4
    assert rep.trajectory[-1] == rep.residual


def test_picard_full_step_on_zero_problem(ex_nonexist):
    rep = picard_solve(ex_nonexist, ex_nonexist.constant_state([1.0, 1.0]), damping=1.0)
    assert rep.converged and rep.sup_norm <= 1e-6


@pytest.mark.parametrize("kw", [{"damping": 0.0}, {"damping": 1.5}, {"tol": 0.0}])
def test_picard_rejects_bad_arguments(ex_exist, kw):
    with pytest.raises(ValueError):
        picard_solve(ex_exist, ex_exist.zero_state(), **kw)


def test_starting_states_layout(ex_exist):
    starts = starting_states(ex_exist, Box((0.5, 1.0)), 8, seed=3)
    labels = [s for s, _ in starts]
    assert labels[:5] == ["zero", "corner", "eigen:0.25", "eigen:0.5", "eigen:0.75"]
    assert labels[5:] == ["random:0", "random:1", "random:2"]
    for _, st in starts:
        assert st.in_cone() and ex_exist.in_box(st, Box((0.5, 1.0)))
    again = starting_states(ex_exist, Box((0.5, 1.0)), 8, seed=3)
    assert all(np.array_equal(a.to_vector(), b.to_vector()) for (_, a), (_, b) in zip(starts, again))


def test_multistart_nonexistence_finds_only_zero(ex_nonexist):
    reps = multistart_search(ex_nonexist, Box((1.0, 1.0)), n_starts=20, seed=0)
    assert len(reps) >= 1
    assert all(r.sup_norm <= 1e-6 for r in reps)


def test_multistart_existence_dedups(ex_exist):
    reps = multistart_search(ex_exist, Box((0.5, 1.0)), n_starts=6, seed=1, rho0=1e-3)
    assert reps
    for a in reps:
        for b in reps:
            assert a is b or a.final_state.distance(b.final_state) > 1e-4
    assert all(r.meets_rho0 for r in reps)
    assert [r.sup_norm for r in reps] == sorted(r.sup_norm for r in reps)


def test_multistart_threads_match_serial(ex_nonexist):
    a = multistart_search(ex_nonexist, Box((1.0, 1.0)), n_starts=6, seed=2, threads=1)
    b = multistart_search(ex_nonexist, Box((1.0, 1.0)), n_starts=6, seed=2, threads=3)
    assert [r.start for r in a] == [r.start for r in b]
    assert [r.residual for r in a] == [r.residual for r in b]


def test_verify_rejects_non_solutions(ex_exist):
    bad = ex_exist.constant_state([0.5, 1.0])
    ok, diag = verify_solution(ex_exist, bad)
    assert not ok and diag["residual"] > 1e-3
    neg = State(-np.ones((2, ex_exist.grid.size)), [0.0, 0.0])
    ok, diag = verify_solution(ex_exist, neg)
    assert not ok and not diag["in_cone"]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("FRAXOL_THREADS", "4")
    assert worker_count() == 4
    monkeypatch.setenv("FRAXOL_THREADS", "junk")
    assert worker_count() == 1


def test_fixed_point_solves_T(ex_exist, corner_solution):
    u = corner_solution.final_state
    assert u.distance(apply_T(ex_exist, u)) <= 1e-8
