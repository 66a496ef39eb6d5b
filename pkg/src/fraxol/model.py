"""Systems of fractional Dirichlet problems and their fixed-point map.

Component ``i`` of a system reads

    (-Delta)^{s_i} u_i = lambda_i f_i(u, P_i[u])   in the ball,
    u_i = eta_i zeta_i B_i[u]                       outside,

and a solution is a fixed point of ``T(u) = I(u) + D(u)`` with
``I(u)_i = lambda_i G_i(F_i(u))`` and ``D(u)_i = eta_i B_i[u] gamma_i``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from fraxol.expr import ExprError, ScalarExpr, expr_from_dict
from fraxol.exterior import ConstantData, ExteriorData, exterior_from_dict
from fraxol.geometry import BallDomain, QuadratureGrid, ball_volume, build_grid
from fraxol.green import DiscreteGreenOperator, assemble, solve_nonhomogeneous
from fraxol.intervals import Interval
from fraxol.kernel import check_order


class SpecError(ValueError):
    """An invalid system description."""


# ------------------------------------------------------------------ functionals


class FunctionalSpec:
    """A real functional of the whole state (a weight ``P_i`` or a boundary ``B_i``)."""

    kind: str = ""

    def evaluate(self, state: "State", system: "DiscreteSystem") -> float:
        raise NotImplementedError

    def bounds(self, rho: Sequence[float], domain: BallDomain) -> Optional[Interval]:
        """Enclosure of the functional over the box cone, or None if no rule applies."""
        return None

    def linear_bound(self, rho: Sequence[float]) -> Optional[float]:
        """A constant ``xi`` with ``|value| <= xi * |u|_inf`` on the box cone, or None."""
        return None

    def components(self) -> set[int]:
        return set()

    def validate(self, m: int, domain: BallDomain) -> None:
        bad = [j for j in self.components() if not 1 <= j <= m]
        if bad:
            raise SpecError(f"{self.kind} refers to component(s) {bad} of a system with m = {m}")

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IntegralOfExp(FunctionalSpec):
    """``int_B exp(u_j)``."""

    component: int
    kind = "integral_exp"

    def evaluate(self, state, system):
        return system.grid.integrate(np.exp(state.interior[self.component - 1]))

    def bounds(self, rho, domain):
        vol = _volume_interval(domain)
        return vol * Interval(0.0, float(rho[self.component - 1])).exp()

    def components(self):
        return {self.component}

    def to_dict(self):
        return {"kind": self.kind, "component": self.component}


@dataclass(frozen=True)
class Integral(FunctionalSpec):
    """``int_B g(u)`` for an expression ``g`` in the component values."""

    expr: ScalarExpr
    kind = "integral"

    def __post_init__(self):
        if self.expr.uses_w():
            raise SpecError("the integrand of an integral functional cannot use w")

    def evaluate(self, state, system):
        vals = self.expr.evaluate(state.interior, None)
        return system.grid.integrate(np.broadcast_to(vals, (system.grid.size,)))

    def bounds(self, rho, domain):
        box = [Interval(0.0, float(r)) for r in rho]
        return _volume_interval(domain) * self.expr.interval(box, None)

    def components(self):
        return self.expr.components()

    def to_dict(self):
        return {"kind": self.kind, "expr": self.expr.to_dict()}


@dataclass(frozen=True)
class Oscillation(FunctionalSpec):
    """``max u_j - min u_j`` over the nodes."""

    component: int
    kind = "oscillation"

    def evaluate(self, state, system):
        u = state.interior[self.component - 1]
        return float(u.max() - u.min())

    def bounds(self, rho, domain):
        return Interval(0.0, float(rho[self.component - 1]))

    def linear_bound(self, rho):
        return 1.0

    def components(self):
        return {self.component}

    def to_dict(self):
        return {"kind": self.kind, "component": self.component}


@dataclass(frozen=True)
class PointProduct(FunctionalSpec):
    """``prod_k u_{j_k}(p_k)``, each factor read at the node nearest to ``p_k``."""

    factors: tuple[tuple[int, tuple[float, ...]], ...]
    kind = "point_product"

    def __post_init__(self):
        if not self.factors:
            raise SpecError("point_product needs at least one factor")
        object.__setattr__(self, "factors", tuple((int(j), tuple(float(c) for c in p)) for j, p in self.factors))

    def evaluate(self, state, system):
        out = 1.0
        for j, p in self.factors:
            out *= float(state.interior[j - 1, system.grid.nearest_node(p)])
        return out

    def bounds(self, rho, domain):
        out = Interval.point(1.0)
        for j, _ in self.factors:
            out = out * Interval(0.0, float(rho[j - 1]))
        return out

    def linear_bound(self, rho):
        # |prod| <= u_k(p_k) * prod_{j != k} rho_j for any k
        best = math.inf
        for k in range(len(self.factors)):
            best = min(best, math.prod(float(rho[j - 1]) for i, (j, _) in enumerate(self.factors) if i != k))
        return best

    def components(self):
        return {j for j, _ in self.factors}

    def validate(self, m, domain):
        super().validate(m, domain)
        for _, p in self.factors:
            if len(p) != domain.dim or not domain.contains(np.array(p)):
                raise SpecError(f"point {list(p)} is not inside the domain")

    def to_dict(self):
        return {"kind": self.kind, "factors": [{"component": j, "point": list(p)} for j, p in self.factors]}


@dataclass(frozen=True)
class LimSup(FunctionalSpec):
    """``limsup_{|x| -> inf} u_j(x)``, exact under the ansatz ``u_j = b_j zeta_j`` outside."""

    component: int
    kind = "limsup"

    def evaluate(self, state, system):
        j = self.component - 1
        return float(state.exterior[j] * system.spec.components[j].zeta.limsup_at_infinity)

    def bounds(self, rho, domain):
        return Interval(0.0, float(rho[self.component - 1]))

    def linear_bound(self, rho):
        return 1.0

    def components(self):
        return {self.component}

    def to_dict(self):
        return {"kind": self.kind, "component": self.component}


@dataclass(frozen=True)
class ConstantFunctional(FunctionalSpec):
    value: float
    kind = "constant"

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise SpecError("constant functional must be finite")

    def evaluate(self, state, system):
        return self.value

    def bounds(self, rho, domain):
        return Interval.point(self.value)

    def linear_bound(self, rho):
        return 0.0 if self.value == 0.0 else None

    def to_dict(self):
        return {"kind": self.kind, "value": self.value}


def _volume_interval(domain: BallDomain) -> Interval:
    v = ball_volume(domain)
    return Interval(math.nextafter(v, 0.0), math.nextafter(v, math.inf))


def functional_from_dict(data) -> FunctionalSpec:
    if not isinstance(data, dict):
        raise SpecError(f"functional must be an object, got {type(data).__name__}")
    kind = data.get("kind")
    try:
        if kind == "integral_exp":
            return IntegralOfExp(_index(data["component"]))
        if kind == "integral":
            return Integral(expr_from_dict(data["expr"]))
        if kind == "oscillation":
            return Oscillation(_index(data["component"]))
        if kind == "point_product":
            return PointProduct(tuple((_index(f["component"]), tuple(f["point"])) for f in data["factors"]))
        if kind == "limsup":
            return LimSup(_index(data["component"]))
        if kind == "constant":
            return ConstantFunctional(float(data["value"]))
    except KeyError as exc:
        raise SpecError(f"functional {kind!r} is missing field {exc.args[0]!r}") from None
    raise SpecError(f"unknown functional kind {kind!r}")


def _index(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise SpecError(f"component index must be a positive integer, got {value!r}")
    return value


# ----------------------------------------------------------------------- specs


@dataclass(frozen=True)
class ComponentSpec:
    s: float
    lam: float
    eta: float
    f: ScalarExpr
    P: FunctionalSpec
    B: FunctionalSpec
    zeta: ExteriorData = ConstantData(1.0)

    def __post_init__(self):
        for name in ("s", "lam", "eta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        try:
            check_order(self.s)
        except ValueError as exc:
            raise SpecError(str(exc)) from None
        for name in ("lam", "eta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise SpecError(f"{name} must be finite and non-negative, got {v!r}")

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "lambda": self.lam,
            "eta": self.eta,
            "f": self.f.to_dict(),
            "P": self.P.to_dict(),
            "B": self.B.to_dict(),
            "zeta": self.zeta.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ComponentSpec":
        try:
            return cls(
                s=float(data["s"]),
                lam=float(data["lambda"]),
                eta=float(data["eta"]),
                f=expr_from_dict(data["f"]),
                P=functional_from_dict(data["P"]),
                B=functional_from_dict(data["B"]),
                zeta=exterior_from_dict(data.get("zeta", {"kind": "constant", "value": 1.0})),
            )
        except KeyError as exc:
            raise SpecError(f"component is missing field {exc.args[0]!r}") from None
        except (ExprError, TypeError) as exc:
            raise SpecError(str(exc)) from None


@dataclass(frozen=True)
class SystemSpec:
    """Full description of an ``m``-component system on a ball.

    ``box`` is an optional default for the radii ``rho`` of the box cone used
    by the certificates.
    """

    components: tuple[ComponentSpec, ...]
    domain: BallDomain = BallDomain()
    resolution: int = 32
    box: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise SpecError("a system needs at least one component")
        if isinstance(self.resolution, bool) or not isinstance(self.resolution, int) or self.resolution < 4:
            raise SpecError(f"resolution must be an integer >= 4, got {self.resolution!r}")
        m = self.m
        for i, c in enumerate(self.components, 1):
            bad = [j for j in c.f.components() if j > m]
            if bad:
                raise SpecError(f"f_{i} uses z{bad[0]} but the system has m = {m}")
            c.P.validate(m, self.domain)
            c.B.validate(m, self.domain)
        if self.box is not None:
            box = tuple(float(r) for r in self.box)
            if len(box) != m or not all(math.isfinite(r) and r > 0 for r in box):
                raise SpecError(f"box must hold {m} positive radii, got {self.box!r}")
            object.__setattr__(self, "box", box)

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def lambdas(self) -> tuple[float, ...]:
        return tuple(c.lam for c in self.components)

    @property
    def etas(self) -> tuple[float, ...]:
        return tuple(c.eta for c in self.components)

    def with_parameters(self, lambdas=None, etas=None, resolution=None) -> "SystemSpec":
        comps = list(self.components)
        if lambdas is not None:
            comps = [replace(c, lam=float(v)) for c, v in zip(comps, _full(lambdas, self.m, "lambdas"))]
        if etas is not None:
            comps = [replace(c, eta=float(v)) for c, v in zip(comps, _full(etas, self.m, "etas"))]
        return replace(self, components=tuple(comps), resolution=self.resolution if resolution is None else resolution)

    def to_dict(self) -> dict:
        out = {
            "m": self.m,
            "domain": {"dim": self.domain.dim, "radius": self.domain.radius},
            "resolution": self.resolution,
            "components": [c.to_dict() for c in self.components],
        }
        if self.box is not None:
            out["box"] = list(self.box)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data) -> "SystemSpec":
        if not isinstance(data, dict):
            raise SpecError("system spec must be a JSON object")
        try:
            comps = tuple(ComponentSpec.from_dict(c) for c in data["components"])
            dom = data.get("domain", {})
            domain = BallDomain(int(dom.get("dim", 2)), float(dom.get("radius", 1.0)))
        except KeyError as exc:
            raise SpecError(f"system spec is missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise SpecError(str(exc)) from None
        if "m" in data and data["m"] != len(comps):
            raise SpecError(f"m = {data['m']} but {len(comps)} components were given")
        box = data.get("box")
        return cls(comps, domain, data.get("resolution", 32), tuple(box) if box is not None else None)

    @classmethod
    def from_json(cls, text: str) -> "SystemSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)


def _full(values, m, name):
    values = list(values)
    if len(values) != m:
        raise SpecError(f"{name} needs {m} values, got {len(values)}")
    return values


# ----------------------------------------------------------------- state, box


@dataclass(frozen=True, eq=False)
class State:
    """Node values inside the ball plus exterior coefficients.

    Outside the ball component ``i`` equals ``exterior[i] * zeta_i``.
    """

    interior: np.ndarray
    exterior: np.ndarray

    def __post_init__(self):
        interior = np.array(self.interior, dtype=float, ndmin=2)
        exterior = np.array(self.exterior, dtype=float, ndmin=1)
        if exterior.shape != (interior.shape[0],):
            raise ValueError(f"exterior must have {interior.shape[0]} entries, got shape {exterior.shape}")
        interior.flags.writeable = False
        exterior.flags.writeable = False
        object.__setattr__(self, "interior", interior)
        object.__setattr__(self, "exterior", exterior)

    @property
    def m(self) -> int:
        return self.interior.shape[0]

    def sup_norms(self, zetas: Sequence[ExteriorData], radius: float) -> np.ndarray:
        """Per-component sup over R^n: interior nodes and the exterior part."""
        ext = np.array([b * z.sup_outside(radius) for b, z in zip(self.exterior, zetas)])
        return np.maximum(np.abs(self.interior).max(axis=1), np.abs(ext))

    def in_cone(self, tol: float = 0.0) -> bool:
        return bool(self.interior.min(initial=0.0) >= -tol and self.exterior.min(initial=0.0) >= -tol)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.interior.ravel(), self.exterior])

    @classmethod
    def from_vector(cls, v, m: int) -> "State":
        v = np.asarray(v, dtype=float)
        return cls(v[:-m].reshape(m, -1), v[-m:])

    def distance(self, other: "State") -> float:
        return float(np.abs(self.to_vector() - other.to_vector()).max())


@dataclass(frozen=True)
class Box:
    """The radii ``rho`` of ``I(rho) = prod [0, rho_i]``."""

    rho: tuple[float, ...]

    def __post_init__(self):
        rho = tuple(float(r) for r in self.rho)
        if not rho or not all(math.isfinite(r) and r > 0 for r in rho):
            raise ValueError(f"box radii must be positive, got {self.rho!r}")
        object.__setattr__(self, "rho", rho)

    @property
    def m(self) -> int:
        return len(self.rho)

    def intervals(self) -> list[Interval]:
        return [Interval(0.0, r) for r in self.rho]

    def contains(self, state: State, zetas: Sequence[ExteriorData], radius: float, tol: float = 0.0) -> bool:
        """Membership of ``state`` in the box cone P(rho)."""
        if not state.in_cone(tol):
            return False
        return bool(np.all(state.sup_norms(zetas, radius) <= np.array(self.rho) + tol))


# ---------------------------------------------------------- discrete system


@lru_cache(maxsize=8)
def cached_grid(domain: BallDomain, resolution: int) -> QuadratureGrid:
    return build_grid(domain, resolution)


@lru_cache(maxsize=16)
def cached_operator(domain: BallDomain, resolution: int, s: float) -> DiscreteGreenOperator:
    return assemble(cached_grid(domain, resolution), domain, s)


@dataclass(frozen=True, eq=False)
class DiscreteSystem:
    """A ``SystemSpec`` together with its grid, Green operators and harmonic lifts."""

    spec: SystemSpec
    grid: QuadratureGrid
    ops: tuple[DiscreteGreenOperator, ...] = field(repr=False)
    lifts: tuple[np.ndarray, ...] = field(repr=False)

    @classmethod
    def build(cls, spec: SystemSpec) -> "DiscreteSystem":
        grid = cached_grid(spec.domain, spec.resolution)
        ops = tuple(cached_operator(spec.domain, spec.resolution, c.s) for c in spec.components)
        lifts = tuple(_cached_lift(spec.domain, spec.resolution, c.s, c.zeta) for c in spec.components)
        return cls(spec, grid, ops, lifts)

    def with_spec(self, spec: SystemSpec) -> "DiscreteSystem":
        """Reuse operators for a spec that differs only in parameters."""
        same = (spec.domain == self.spec.domain and spec.resolution == self.spec.resolution
                and [(c.s, c.zeta) for c in spec.components] == [(c.s, c.zeta) for c in self.spec.components])
        return replace(self, spec=spec) if same else DiscreteSystem.build(spec)

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def zetas(self) -> tuple[ExteriorData, ...]:
        return tuple(c.zeta for c in self.spec.components)

    def zero_state(self) -> State:
        return State(np.zeros((self.m, self.grid.size)), np.zeros(self.m))

    def constant_state(self, levels: Sequence[float]) -> State:
        """Interior values ``levels[i]`` and the largest exterior coefficient inside the box."""
        levels = np.asarray(levels, dtype=float)
        ext = np.array([lv / z.sup_outside(self.spec.domain.radius) if z.sup_outside(self.spec.domain.radius) > 0 else 0.0
                        for lv, z in zip(levels, self.zetas)])
        return State(np.repeat(levels[:, None], self.grid.size, axis=1), ext)

    def sup_norms(self, state: State) -> np.ndarray:
        return state.sup_norms(self.zetas, self.spec.domain.radius)

    def in_box(self, state: State, box: Box, tol: float = 0.0) -> bool:
        return box.contains(state, self.zetas, self.spec.domain.radius, tol)


@lru_cache(maxsize=32)
def _cached_lift(domain: BallDomain, resolution: int, s: float, zeta: ExteriorData) -> np.ndarray:
    lift = solve_nonhomogeneous(cached_operator(domain, resolution, s), 0.0, zeta)
    lift.flags.writeable = False
    return lift


def eval_functional(spec: FunctionalSpec, state: State, system: DiscreteSystem) -> float:
    return float(spec.evaluate(state, system))


def nemytskii(system: DiscreteSystem, i: int, state: State) -> np.ndarray:
    """Node values of ``f_i(u(x), P_i[u])`` (``i`` is zero-based)."""
    comp = system.spec.components[i]
    w = eval_functional(comp.P, state, system)
    vals = comp.f.evaluate(state.interior, w)
    return np.array(np.broadcast_to(vals, (system.grid.size,)), dtype=float)


def apply_T(system: DiscreteSystem, state: State) -> State:
    """One application of the fixed-point map ``T = I + D``."""
    interior = np.empty_like(state.interior)
    exterior = np.empty(system.m)
    for i, comp in enumerate(system.spec.components):
        b = comp.eta * eval_functional(comp.B, state, system)
        part = b * system.lifts[i]
        if comp.lam != 0.0:
            part = part + comp.lam * (system.ops[i].matrix @ nemytskii(system, i, state))
        interior[i] = part
        exterior[i] = b
    return State(interior, exterior)


def residual(system: DiscreteSystem, state: State) -> float:
    """Sup-norm defect ``|u - T(u)|`` over nodes and exterior coefficients."""
    return state.distance(apply_T(system, state))
