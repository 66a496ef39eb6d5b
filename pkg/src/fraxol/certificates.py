"""Mechanical checks of the existence and non-existence criteria.

Sup/inf bounds on nonlinearities come from interval arithmetic and bounds on
functionals from per-kind rules, so every bound used in a verdict is an
over-estimate in the safe direction.  The only unquantified error is the
discretisation of the principal eigenvalue ``mu`` (and of the operator norms
when they are taken from the grid).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np

from fraxol.expr import ExprError, ScalarExpr, divide_by_component
from fraxol.geometry import BallDomain
from fraxol.green import EigenPair, spectral_radius, sup_norm_G1
from fraxol.intervals import Interval, add_up, mul_up
from fraxol.kernel import torsion_closed_form
from fraxol.model import Box, DiscreteSystem, FunctionalSpec, SystemSpec, cached_operator

EXISTENCE = "existence_certified"
NONEXISTENCE = "nonexistence_certified"
INCONCLUSIVE = "inconclusive"

DISCLAIMER = ("numerical certificate: bounds on f_i and the functionals are interval-sound; "
              "mu and any numeric-discrete norm carry unquantified discretisation error")


# ------------------------------------------------------------------- bounds


@dataclass(frozen=True)
class SpecBounds:
    """Per-component constants over the box cone ``P(rho)``; None means unavailable."""

    rho: tuple[float, ...]
    omega: tuple[Optional[Interval], ...]
    f_range: tuple[Optional[Interval], ...]
    B_range: tuple[Optional[Interval], ...]
    tau: tuple[Optional[float], ...]
    xi: tuple[Optional[float], ...]

    @property
    def M(self) -> tuple[Optional[float], ...]:
        return tuple(None if r is None else r.hi for r in self.f_range)

    @property
    def B_sup(self) -> tuple[Optional[float], ...]:
        return tuple(None if r is None else r.hi for r in self.B_range)


def _expr_range(expr: ScalarExpr, zbox: Sequence[Interval], w: Optional[Interval]) -> Optional[Interval]:
    if w is None and expr.uses_w():
        return None
    try:
        return expr.interval(zbox, w)
    except ExprError:
        return None


def bounds_from_spec(spec: SystemSpec, box: Box) -> SpecBounds:
    """Enclosures of ``P_i``, ``f_i`` and ``B_i`` over ``P(rho)``, and the
    linear-growth constants ``tau_i`` (``f_i <= tau_i z_i``) and ``xi_i``
    (``|B_i| <= xi_i |u|_inf``).

    ``tau_i`` needs ``f_i`` to carry a literal factor ``z_i``; it is then the
    upper interval bound of the quotient.
    """
    if box.m != spec.m:
        raise ValueError(f"box has {box.m} radii for a system with m = {spec.m}")
    zbox = box.intervals()
    omega, f_range, B_range, tau, xi = [], [], [], [], []
    for i, c in enumerate(spec.components):
        w = c.P.bounds(box.rho, spec.domain)
        omega.append(w)
        f_range.append(_expr_range(c.f, zbox, w))
        B_range.append(c.B.bounds(box.rho, spec.domain))
        q = divide_by_component(c.f, i + 1)
        qr = None if q is None else _expr_range(q, zbox, w)
        tau.append(None if qr is None else max(qr.hi, 0.0))
        xi.append(c.B.linear_bound(box.rho))
    return SpecBounds(box.rho, tuple(omega), tuple(f_range), tuple(B_range), tuple(tau), tuple(xi))


# -------------------------------------------------------------------- norms


@lru_cache(maxsize=16)
def principal_eigenpair(domain: BallDomain, resolution: int, s: float) -> EigenPair:
    return spectral_radius(cached_operator(domain, resolution, s))


def operator_norms(system: DiscreteSystem, source: str = "analytic") -> tuple[list[float], list[float], dict]:
    """``|G_i(1)|_inf`` and ``|gamma_i|_inf`` with their provenance.

    ``source="analytic"`` uses the closed-form torsion maximum and, for
    constant exterior data, ``gamma_i = zeta_i``; otherwise the grid values.
    """
    if source not in ("analytic", "discrete"):
        raise ValueError(f"norm source must be 'analytic' or 'discrete', got {source!r}")
    dom = system.spec.domain
    origin = np.zeros(dom.dim)
    g1, gam, prov = [], [], {}
    for i, c in enumerate(system.spec.components):
        k = i + 1
        if source == "analytic":
            g1.append(torsion_closed_form(origin, dom, c.s))
            prov[f"G1_{k}"] = "analytic"
        else:
            g1.append(sup_norm_G1(system.ops[i]))
            prov[f"G1_{k}"] = "numeric-discrete"
        if source == "analytic" and c.zeta.is_constant():
            gam.append(float(c.zeta.sup))
            prov[f"gamma_{k}"] = "analytic"
        else:
            gam.append(max(float(system.lifts[i].max()), c.zeta.sup_outside(dom.radius)))
            prov[f"gamma_{k}"] = "numeric-discrete"
    return g1, gam, prov


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Verdict:
    """Outcome with the slack of every inequality (None where a constant was unavailable)."""

    outcome: str
    mode: str
    slacks: Mapping[str, Optional[float]]
    provenance: Mapping[str, str]
    constants: Mapping[str, object] = field(default_factory=dict)
    disclaimer: str = DISCLAIMER

    @property
    def certified(self) -> bool:
        return self.outcome != INCONCLUSIVE

    @property
    def min_slack(self) -> float:
        """Smallest slack among the parameter inequalities and any violated condition.

        Sign conditions that hold with equality (a zero lower bound) and the
        ``mu <= delta lambda`` tie produced by the automatic ``delta`` are left
        out, so the value tracks the binding inequality.
        """
        vals = [v for k, v in self.slacks.items()
                if v is not None and (k.startswith(("c2_", "d_")) or v < 0)]
        return min(vals) if vals else math.nan

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "mode": self.mode,
            "slacks": dict(self.slacks),
            "min_slack": self.min_slack,
            "constants": dict(self.constants),
            "provenance": dict(self.provenance),
            "disclaimer": self.disclaimer,
        }


def _upper_sum(terms: Sequence[tuple[float, ...]]) -> float:
    # rounded-up value of sum_k prod(terms[k])
    total = 0.0
    for factors in terms:
        p = 1.0
        for f in factors:
            p = mul_up(p, f)
        total = add_up(total, p)
    return total


def _slack(bound: float, used: float) -> float:
    return float(bound - used)


@dataclass(frozen=True)
class ExistenceHypotheses:
    """Everything the existence criterion consumes, for one parameter point."""

    rho: tuple[float, ...]
    lambdas: tuple[float, ...]
    etas: tuple[float, ...]
    bounds: SpecBounds
    G1_norms: tuple[float, ...]
    gamma_norms: tuple[float, ...]
    i0: int
    mu: float
    delta: Optional[float]
    rho0: Optional[float]
    f_i0: ScalarExpr
    P_i0: FunctionalSpec
    domain: BallDomain
    provenance: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class NonexistenceHypotheses:
    rho: tuple[float, ...]
    lambdas: tuple[float, ...]
    etas: tuple[float, ...]
    tau: tuple[Optional[float], ...]
    xi: tuple[Optional[float], ...]
    omega: tuple[Optional[Interval], ...]
    G1_norms: tuple[float, ...]
    gamma_norms: tuple[float, ...]
    provenance: Mapping[str, str] = field(default_factory=dict)


def _lower_on_small_box(f: ScalarExpr, P: FunctionalSpec, m: int, r0: float, domain: BallDomain):
    rho0 = (r0,) * m
    w = P.bounds(rho0, domain)
    return _expr_range(f, [Interval(0.0, r0)] * m, w), w


def _condition_b(h: ExistenceHypotheses) -> Optional[float]:
    """Slack of ``f_i0 >= delta z_i0`` on the small box; None when undecidable.

    Two sufficient tests: ``inf f_i0 >= delta rho0`` and, when ``f_i0 = z_i0 q``,
    ``inf q >= delta``.  The better of the two is reported.
    """
    if h.delta is None or h.rho0 is None:
        return None
    m = len(h.rho)
    rng, w = _lower_on_small_box(h.f_i0, h.P_i0, m, h.rho0, h.domain)
    best = None
    if rng is not None:
        best = rng.lo - mul_up(h.delta, h.rho0)
    q = divide_by_component(h.f_i0, h.i0 + 1)
    if q is not None:
        qr = _expr_range(q, [Interval(0.0, h.rho0)] * m, w)
        if qr is not None:
            cand = qr.lo - h.delta
            best = cand if best is None else max(best, cand)
    return best


def check_existence(h: ExistenceHypotheses) -> Verdict:
    """Check the positivity hypotheses, the lower-growth condition at ``i0``
    and the two inequalities ``mu <= delta lambda_i0`` and
    ``lambda_i M_i |G_i 1| + eta_i B_i |gamma_i| <= rho_i``.

    Non-strict inequalities: a tie gives zero slack and still certifies.
    """
    m = len(h.rho)
    b = h.bounds
    slacks: dict[str, Optional[float]] = {}
    for i in range(m):
        k = i + 1
        slacks[f"a1_{k}"] = 0.0 if b.omega[i] is not None else None
        slacks[f"a2_{k}"] = None if b.f_range[i] is None else b.f_range[i].lo
        slacks[f"a3_{k}"] = None if b.B_range[i] is None else b.B_range[i].lo
    if h.rho0 is None:
        slacks["rho0"] = None
    else:
        slacks["rho0"] = min(h.rho0, min(h.rho) - h.rho0)
    slacks["b"] = _condition_b(h)
    if h.lambdas[h.i0] == 0.0:
        slacks["c1"] = -h.mu
    else:
        slacks["c1"] = None if h.delta is None else h.delta * h.lambdas[h.i0] - h.mu
    for i in range(m):
        M, Bs = b.M[i], b.B_sup[i]
        terms = []
        ok = True
        if h.lambdas[i] != 0.0:
            ok &= M is not None
            terms.append((h.lambdas[i], M or 0.0, h.G1_norms[i]))
        if h.etas[i] != 0.0:
            ok &= Bs is not None
            terms.append((h.etas[i], Bs or 0.0, h.gamma_norms[i]))
        slacks[f"c2_{i + 1}"] = _slack(h.rho[i], _upper_sum(terms)) if ok else None
    certified = all(v is not None for v in slacks.values()) and slacks["rho0"] > 0 and all(
        v >= 0 for key, v in slacks.items() if key != "rho0")
    constants = {
        "rho": list(h.rho),
        "i0": h.i0 + 1,
        "delta": h.delta,
        "rho0": h.rho0,
        "mu": h.mu,
        "omega": [None if w is None else [w.lo, w.hi] for w in b.omega],
        "M": list(b.M),
        "B": list(b.B_sup),
        "G1_norm": list(h.G1_norms),
        "gamma_norm": list(h.gamma_norms),
    }
    return Verdict(EXISTENCE if certified else INCONCLUSIVE, "existence", slacks, dict(h.provenance), constants)


def check_nonexistence(h: NonexistenceHypotheses) -> Verdict:
    """Check ``lambda_i tau_i |G_i 1| + eta_i xi_i |gamma_i| < 1`` for every i.

    A term whose parameter is zero vanishes whatever the constant, so a
    missing ``tau_i`` (or ``xi_i``) only matters when ``lambda_i > 0``
    (or ``eta_i > 0``).
    """
    slacks: dict[str, Optional[float]] = {}
    for i in range(len(h.rho)):
        terms, ok = [], True
        if h.lambdas[i] != 0.0:
            ok &= h.tau[i] is not None
            terms.append((h.lambdas[i], h.tau[i] or 0.0, h.G1_norms[i]))
        if h.etas[i] != 0.0:
            ok &= h.xi[i] is not None
            terms.append((h.etas[i], h.xi[i] or 0.0, h.gamma_norms[i]))
        slacks[f"d_{i + 1}"] = _slack(1.0, _upper_sum(terms)) if ok else None
    certified = all(v is not None and v > 0 for v in slacks.values())
    constants = {
        "rho": list(h.rho),
        "tau": list(h.tau),
        "xi": list(h.xi),
        "omega": [None if w is None else [w.lo, w.hi] for w in h.omega],
        "G1_norm": list(h.G1_norms),
        "gamma_norm": list(h.gamma_norms),
    }
    return Verdict(NONEXISTENCE if certified else INCONCLUSIVE, "nonexistence", slacks, dict(h.provenance), constants)


# ------------------------------------------------------------- construction


def _resolve_box(spec: SystemSpec, box) -> Box:
    if box is None:
        if spec.box is None:
            raise ValueError("no box given and the system has no default box")
        return Box(spec.box)
    return box if isinstance(box, Box) else Box(tuple(box))


def _bound_provenance(m: int) -> dict:
    prov = {}
    for k in range(1, m + 1):
        prov.update({f"omega_{k}": "interval", f"M_{k}": "interval", f"B_{k}": "interval",
                     f"tau_{k}": "interval", f"xi_{k}": "analytic"})
    return prov


def _auto_delta_rho0(c, i: int, m: int, rho: tuple[float, ...], mu: float, domain: BallDomain):
    """``delta = mu / lambda_i`` and the largest ``rho0`` the lower bound of ``f_i`` allows."""
    if c.lam <= 0:
        return None, None
    delta = mu / c.lam
    while delta * c.lam < mu:
        delta = math.nextafter(delta, math.inf)
    cap = min(rho) / 2
    rng, w = _lower_on_small_box(c.f, c.P, m, cap, domain)
    if rng is not None and rng.lo > 0:
        r0 = min(cap, rng.lo / delta)
        while r0 > 0 and mul_up(delta, r0) > rng.lo:
            r0 = math.nextafter(r0, 0.0)
        return delta, r0
    q = divide_by_component(c.f, i + 1)
    if q is not None:
        qr = _expr_range(q, [Interval(0.0, cap)] * m, w)
        if qr is not None and qr.lo >= delta:
            return delta, cap
    return delta, None


def existence_hypotheses(system: DiscreteSystem, box=None, i0: Optional[int] = None,
                         delta: Optional[float] = None, rho0: Optional[float] = None,
                         norm_source: str = "analytic") -> ExistenceHypotheses:
    """Assemble :class:`ExistenceHypotheses`, choosing ``delta`` and ``rho0``
    automatically unless given.

    ``i0`` is zero-based; by default the first component with ``lambda > 0``
    for which the automatic choice succeeds (else the first with ``lambda > 0``).
    """
    spec = system.spec
    box = _resolve_box(spec, box)
    b = bounds_from_spec(spec, box)
    g1, gam, prov = operator_norms(system, norm_source)
    prov.update(_bound_provenance(spec.m))
    candidates = [i0] if i0 is not None else [i for i, c in enumerate(spec.components) if c.lam > 0] or [0]
    chosen = None
    for i in candidates:
        c = spec.components[i]
        mu = principal_eigenpair(spec.domain, spec.resolution, c.s).mu
        d, r0 = _auto_delta_rho0(c, i, spec.m, box.rho, mu, spec.domain)
        d = delta if delta is not None else d
        r0 = rho0 if rho0 is not None else r0
        if chosen is None or (chosen[2] is None or chosen[3] is None):
            chosen = (i, mu, d, r0)
        if d is not None and r0 is not None:
            break
    i, mu, d, r0 = chosen
    prov[f"mu_{i + 1}"] = "numeric-discrete"
    prov["delta"] = "user" if delta is not None else "auto"
    prov["rho0"] = "user" if rho0 is not None else "auto"
    c = spec.components[i]
    return ExistenceHypotheses(box.rho, spec.lambdas, spec.etas, b, tuple(g1), tuple(gam), i, mu, d, r0,
                               c.f, c.P, spec.domain, prov)


def nonexistence_hypotheses(system: DiscreteSystem, box=None, norm_source: str = "analytic") -> NonexistenceHypotheses:
    spec = system.spec
    box = _resolve_box(spec, box)
    b = bounds_from_spec(spec, box)
    g1, gam, prov = operator_norms(system, norm_source)
    prov.update(_bound_provenance(spec.m))
    return NonexistenceHypotheses(box.rho, spec.lambdas, spec.etas, b.tau, b.xi, b.omega, tuple(g1), tuple(gam), prov)


def certify(system: DiscreteSystem, mode: str, box=None, norm_source: str = "analytic", **kwargs) -> Verdict:
    if mode == "existence":
        return check_existence(existence_hypotheses(system, box, norm_source=norm_source, **kwargs))
    if mode == "nonexistence":
        return check_nonexistence(nonexistence_hypotheses(system, box, norm_source))
    raise ValueError(f"mode must be 'existence' or 'nonexistence', got {mode!r}")


def parameter_boundary(system: DiscreteSystem, component: int, mode: str, box=None,
                       norm_source: str = "analytic") -> Optional[float]:
    """Largest ``lambda`` of ``component`` (zero-based) for which the
    component's inequality still holds, other parameters fixed.

    Both inequalities are affine in ``lambda``; returns None when the needed
    constant is unavailable and ``inf`` when ``lambda`` does not enter.
    """
    spec = system.spec
    box = _resolve_box(spec, box)
    b = bounds_from_spec(spec, box)
    g1, gam, _ = operator_norms(system, norm_source)
    i = component
    eta = spec.components[i].eta
    if mode == "existence":
        coeff, rhs = b.M[i], box.rho[i]
        other = b.B_sup[i]
    elif mode == "nonexistence":
        coeff, rhs = b.tau[i], 1.0
        other = b.xi[i]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if coeff is None or (eta != 0.0 and other is None):
        return None
    rest = rhs - (eta * other * gam[i] if eta != 0.0 else 0.0)
    slope = coeff * g1[i]
    if slope == 0.0:
        return math.inf if rest >= 0 else None
    return rest / slope


# ------------------------------------------------------------------- scans


@dataclass(frozen=True)
class ScanRow:
    lambdas: tuple[float, ...]
    etas: tuple[float, ...]
    verdict: str
    min_slack: float


def feasible_region_scan(system: DiscreteSystem, axes: Mapping[str, Sequence[float]], mode: str,
                         box=None, norm_source: str = "analytic") -> list[ScanRow]:
    """Verdicts over the Cartesian product of parameter values.

    ``axes`` maps names ``lambda1 .. lambdam`` and ``eta1 .. etam`` to value
    lists; other parameters keep their values from the system.  Rows come in
    row-major order over ``lambda1, ..., lambdam, eta1, ..., etam``.
    """
    spec = system.spec
    m = spec.m
    names = [f"lambda{k}" for k in range(1, m + 1)] + [f"eta{k}" for k in range(1, m + 1)]
    unknown = set(axes) - set(names)
    if unknown:
        raise ValueError(f"unknown scan axes {sorted(unknown)}")
    base = list(spec.lambdas) + list(spec.etas)
    values = [list(axes[n]) if n in axes else [base[k]] for k, n in enumerate(names)]
    rows = []
    for point in itertools.product(*values):
        lam, eta = point[:m], point[m:]
        sub = system.with_spec(spec.with_parameters(lam, eta))
        v = certify(sub, mode, box, norm_source)
        rows.append(ScanRow(tuple(float(x) for x in lam), tuple(float(x) for x in eta), v.outcome, v.min_slack))
    return rows
