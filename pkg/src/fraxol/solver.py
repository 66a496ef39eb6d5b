"""Fixed-point solvers for ``u = T(u)``: damped Picard, finite-difference
Newton and a multistart driver."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from fraxol.green import spectral_radius
from fraxol.model import Box, DiscreteSystem, State, apply_T, eval_functional, nemytskii, residual


@dataclass(frozen=True, eq=False)
class SolveReport:
    final_state: State = field(repr=False)
    residual: float
    iterations: int
    converged: bool
    method: str
    tol: float
    trajectory: tuple[float, ...] = field(default=(), repr=False)
    message: str = ""
    start: str = ""
    sup_norm: float = 0.0
    meets_rho0: Optional[bool] = None


def _report(system, state, res, it, tol, method, traj, message="") -> SolveReport:
    return SolveReport(state, res, it, res <= tol, method, tol, tuple(traj), message,
                       sup_norm=float(system.sup_norms(state).max()))


def picard_solve(system: DiscreteSystem, init: State, damping: float = 0.5, tol: float = 1e-8,
                 max_iter: int = 2000, record: bool = False) -> SolveReport:
    """Iterate ``u <- (1 - damping) u + damping T(u)`` until ``|u - T(u)| <= tol``.

    The residual is measured before each update, so the reported residual is
    exactly ``residual(system, final_state)``.  Non-convergence is reported in
    the result, never raised.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    u = init
    traj = []
    for it in range(max_iter + 1):
        t = apply_T(system, u)
        res = u.distance(t)
        if record:
            traj.append(res)
        if not np.isfinite(res):
            return _report(system, u, res, it, tol, "picard", traj, "iteration diverged")
        if res <= tol or it == max_iter:
            break
        u = State((1 - damping) * u.interior + damping * t.interior,
                  (1 - damping) * u.exterior + damping * t.exterior)
    msg = "" if res <= tol else f"no convergence after {max_iter} iterations"
    return _report(system, u, res, it, tol, "picard", traj, msg)


def _jacobian(system: DiscreteSystem, state: State, t_state: State) -> np.ndarray:
    """Forward-difference Jacobian of ``v -> v - T(v)``.

    A column perturbs one unknown; it moves the functionals (evaluated here
    per column) and, for an interior unknown, the Nemytskii value at its own
    node.  Everything else follows from linearity of the Green operators.
    """
    m, N = system.m, system.grid.size
    v = state.to_vector()
    eps = 1e-6 * (1 + np.abs(v))
    C = v.size
    comps = system.spec.components
    w0 = np.array([eval_functional(c.P, state, system) for c in comps])
    b0 = np.array([eval_functional(c.B, state, system) for c in comps])
    dw = np.empty((m, C))
    db = np.empty((m, C))
    work = v.copy()
    for col in range(C):
        work[col] = v[col] + eps[col]
        pert = State.from_vector(work, m)
        for i, c in enumerate(comps):
            dw[i, col] = eval_functional(c.P, pert, system) - w0[i]
            db[i, col] = eval_functional(c.B, pert, system) - b0[i]
        work[col] = v[col]

    z = state.interior
    own_cols = np.arange(m * N)
    own_comp, own_node = np.divmod(own_cols, N)
    z_own = z[:, own_node].copy()
    z_own[own_comp, own_cols] += eps[own_cols]

    dT = np.empty((C, C))
    for i, c in enumerate(comps):
        base = np.broadcast_to(c.f.evaluate(z, w0[i]), (N,))
        shifted = c.f.evaluate(z[:, :, None], w0[i] + dw[i][None, :])
        dF = np.array(np.broadcast_to(shifted, (N, C)), dtype=float) - base[:, None]
        own = np.broadcast_to(c.f.evaluate(z_own, w0[i] + dw[i, :m * N]), (m * N,))
        dF[own_node, own_cols] = own - base[own_node]
        rows = slice(i * N, (i + 1) * N)
        dT[rows] = c.eta * db[i][None, :] * system.lifts[i][:, None]
        if c.lam != 0.0:
            dT[rows] += c.lam * (system.ops[i].matrix @ dF)
        dT[m * N + i] = c.eta * db[i]
    J = -dT / eps[None, :]
    J[np.diag_indices(C)] += 1.0
    return J


def newton_solve(system: DiscreteSystem, init: State, tol: float = 1e-8, max_iter: int = 50) -> SolveReport:
    """Newton's method on ``R(v) = v - T(v)`` with a finite-difference Jacobian.

    Iterates are clamped to the cone after every step.  A singular Jacobian
    ends the run with ``converged=False``.
    """
    from scipy.linalg import LinAlgError, lu_factor, lu_solve

    if not tol > 0:
        raise ValueError("tol must be positive")
    m = system.m
    u = init
    traj = []
    for it in range(max_iter + 1):
        t = apply_T(system, u)
        r = u.to_vector() - t.to_vector()
        res = float(np.abs(r).max())
        traj.append(res)
        if not np.isfinite(res):
            return _report(system, u, res, it, tol, "newton", traj, "iteration diverged")
        if res <= tol or it == max_iter:
            break
        J = _jacobian(system, u, t)
        try:
            with np.errstate(all="raise"):
                lu = lu_factor(J, check_finite=True)
            if np.any(np.abs(np.diag(lu[0])) < 1e-14 * np.abs(np.diag(lu[0])).max()):
                raise LinAlgError("singular")
            step = lu_solve(lu, -r)
        except (LinAlgError, ValueError, FloatingPointError):
            return _report(system, u, res, it, tol, "newton", traj, "singular Jacobian")
        u = State.from_vector(np.maximum(u.to_vector() + step, 0.0), m)
    msg = "" if res <= tol else f"no convergence after {max_iter} iterations"
    return _report(system, u, res, it, tol, "newton", traj, msg)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("FRAXOL_THREADS", "1")))
    except ValueError:
        return 1


def starting_states(system: DiscreteSystem, box: Box, n_starts: int, seed: int = 0,
                    scalings: Sequence[float] = (0.25, 0.5, 0.75)) -> list[tuple[str, State]]:
    """The zero state, the box corner, eigenfunction scalings and seeded random states."""
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    rho = np.array(box.rho)
    radius = system.spec.domain.radius
    starts = [("zero", system.zero_state()), ("corner", system.constant_state(rho))]
    phis = np.array([spectral_radius(op).eigenfunction for op in system.ops])
    for sigma in scalings:
        starts.append((f"eigen:{sigma:g}", State(sigma * rho[:, None] * phis, np.zeros(system.m))))
    rng = np.random.default_rng(seed)
    sups = np.array([z.sup_outside(radius) for z in system.zetas])
    cap = np.divide(rho, sups, out=np.zeros_like(rho), where=sups > 0)
    k = 0
    while len(starts) < n_starts:
        interior = rng.uniform(0.0, 1.0, (system.m, system.grid.size)) * rho[:, None]
        exterior = rng.uniform(0.0, 1.0, system.m) * cap
        starts.append((f"random:{k}", State(interior, exterior)))
        k += 1
    return starts[:n_starts]


def multistart_search(system: DiscreteSystem, box: Box, n_starts: int = 20, seed: int = 0,
                      rho0: Optional[float] = None, tol: float = 1e-8, damping: float = 0.5,
                      max_iter: int = 2000, newton_fallback: bool = True,
                      threads: Optional[int] = None) -> list[SolveReport]:
    """Solve from many starts and return the distinct converged solutions.

    Reports are sorted by ``(sup norm, residual)`` and merged when their
    states are within ``1e-4`` in sup-distance.  With ``rho0`` each report
    records whether its sup norm reaches ``rho0``.
    """
    starts = starting_states(system, box, n_starts, seed)

    def run(item):
        label, init = item
        rep = picard_solve(system, init, damping, tol, max_iter)
        if not rep.converged and newton_fallback:
            alt = newton_solve(system, rep.final_state, tol)
            if alt.converged:
                rep = alt
        return replace(rep, start=label)

    workers = threads if threads is not None else worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, starts))
    else:
        reports = [run(item) for item in starts]

    found = sorted((r for r in reports if r.converged), key=lambda r: (r.sup_norm, r.residual))
    distinct: list[SolveReport] = []
    for rep in found:
        if all(rep.final_state.distance(d.final_state) > 1e-4 for d in distinct):
            distinct.append(rep)
    if rho0 is not None:
        distinct = [replace(r, meets_rho0=bool(r.sup_norm >= rho0)) for r in distinct]
    return distinct


def verify_solution(system: DiscreteSystem, state: State, tol: float = 1e-8,
                    box: Optional[Box] = None, rho0: Optional[float] = None) -> tuple[bool, dict]:
    """Check the fixed-point identity and positivity of ``state``.

    Returns ``(ok, diagnostics)``; ``ok`` holds iff the residual is at most
    ``tol`` and the state lies in the cone.  Diagnostics report the largest
    Nemytskii value per component, per-component sup norms and whether the
    state is a non-zero positive solution.
    """
    res = residual(system, state)
    sups = system.sup_norms(state)
    in_cone = state.in_cone()
    ok = bool(res <= tol and in_cone)
    diag = {
        "residual": res,
        "in_cone": in_cone,
        "sup_norms": [float(x) for x in sups],
        "max_abs_F": [float(np.abs(nemytskii(system, i, state)).max()) for i in range(system.m)],
        "nonzero": bool(sups.max() > 0.0),
    }
    diag["nonzero_positive"] = bool(ok and diag["nonzero"])
    if box is not None:
        diag["within_box"] = bool(np.all(sups <= np.array(box.rho) + 1e-8))
    if rho0 is not None:
        diag["meets_rho0"] = bool(sups.max() >= rho0)
    return ok, diag
