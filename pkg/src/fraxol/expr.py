"""Nonlinearity expression trees.

A ``ScalarExpr`` is built from non-negative constants, the component values
``z1 .. zm``, the functional value ``w``, the binary operations ``+ - *``,
``exp`` and non-negative integer powers.  There is no division, so every
expression is a total, continuous function and can be bounded by interval
arithmetic on any box.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from fraxol.intervals import Interval


class ExprError(ValueError):
    pass


class ScalarExpr:
    """Base class; see the concrete node types below."""

    def evaluate(self, z: Sequence, w):
        raise NotImplementedError

    def interval(self, zbox: Sequence[Interval], w: Optional[Interval]) -> Interval:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def components(self) -> set[int]:
        return set().union(*(c.components() for c in self.children()))

    def uses_w(self) -> bool:
        return any(c.uses_w() for c in self.children())

    def children(self) -> tuple[ScalarExpr, ...]:
        return ()

    # operator sugar used by presets and tests
    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __pow__(self, k):
        return Pow(self, k)


@dataclass(frozen=True, eq=True)
class Const(ScalarExpr):
    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ExprError(f"constants must be finite and non-negative, got {self.value}")

    def evaluate(self, z, w):
        return self.value

    def interval(self, zbox, w):
        return Interval.point(self.value)

    def to_dict(self):
        return {"const": float(self.value)}

    def __str__(self):
        return repr(float(self.value))


@dataclass(frozen=True, eq=True)
class Var(ScalarExpr):
    """Component value ``z_index`` (1-based)."""

    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 1:
            raise ExprError(f"component index must be a positive integer, got {self.index}")

    def evaluate(self, z, w):
        return z[self.index - 1]

    def interval(self, zbox, w):
        if self.index > len(zbox):
            raise ExprError(f"z{self.index} is outside the box of dimension {len(zbox)}")
        return zbox[self.index - 1]

    def components(self):
        return {self.index}

    def to_dict(self):
        return {"var": f"z{self.index}"}

    def __str__(self):
        return f"z{self.index}"


@dataclass(frozen=True, eq=True)
class W(ScalarExpr):
    """The functional value entering the nonlinearity."""

    def evaluate(self, z, w):
        return w

    def interval(self, zbox, w):
        if w is None:
            raise ExprError("expression uses w but no interval for w was supplied")
        return w

    def uses_w(self):
        return True

    def to_dict(self):
        return {"var": "w"}

    def __str__(self):
        return "w"


@dataclass(frozen=True, eq=True)
class Add(ScalarExpr):
    a: ScalarExpr
    b: ScalarExpr

    def children(self):
        return (self.a, self.b)

    def evaluate(self, z, w):
        return self.a.evaluate(z, w) + self.b.evaluate(z, w)

    def interval(self, zbox, w):
        return self.a.interval(zbox, w) + self.b.interval(zbox, w)

    def to_dict(self):
        return {"op": "add", "args": [self.a.to_dict(), self.b.to_dict()]}

    def __str__(self):
        return f"({self.a} + {self.b})"


@dataclass(frozen=True, eq=True)
class Sub(ScalarExpr):
    a: ScalarExpr
    b: ScalarExpr

    def children(self):
        return (self.a, self.b)

    def evaluate(self, z, w):
        return self.a.evaluate(z, w) - self.b.evaluate(z, w)

    def interval(self, zbox, w):
        return self.a.interval(zbox, w) - self.b.interval(zbox, w)

    def to_dict(self):
        return {"op": "sub", "args": [self.a.to_dict(), self.b.to_dict()]}

    def __str__(self):
        return f"({self.a} - {self.b})"


@dataclass(frozen=True, eq=True)
class Mul(ScalarExpr):
    a: ScalarExpr
    b: ScalarExpr

    def children(self):
        return (self.a, self.b)

    def evaluate(self, z, w):
        return self.a.evaluate(z, w) * self.b.evaluate(z, w)

    def interval(self, zbox, w):
        return self.a.interval(zbox, w) * self.b.interval(zbox, w)

    def to_dict(self):
        return {"op": "mul", "args": [self.a.to_dict(), self.b.to_dict()]}

    def __str__(self):
        return f"{_paren(self.a)} * {_paren(self.b)}"


@dataclass(frozen=True, eq=True)
class Exp(ScalarExpr):
    a: ScalarExpr

    def children(self):
        return (self.a,)

    def evaluate(self, z, w):
        return np.exp(self.a.evaluate(z, w))

    def interval(self, zbox, w):
        return self.a.interval(zbox, w).exp()

    def to_dict(self):
        return {"op": "exp", "args": [self.a.to_dict()]}

    def __str__(self):
        return f"exp({self.a})"


@dataclass(frozen=True, eq=True)
class Pow(ScalarExpr):
    a: ScalarExpr
    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 0:
            raise ExprError(f"powers must be non-negative integers, got {self.k!r}")

    def children(self):
        return (self.a,)

    def evaluate(self, z, w):
        return self.a.evaluate(z, w) ** self.k

    def interval(self, zbox, w):
        return self.a.interval(zbox, w) ** self.k

    def to_dict(self):
        return {"op": "pow", "args": [self.a.to_dict()], "power": self.k}

    def __str__(self):
        return f"{_paren(self.a)}**{self.k}"


def _paren(e: ScalarExpr) -> str:
    text = str(e)
    if isinstance(e, (Const, Var, W, Exp, Add, Sub)):
        return text
    return f"({text})"


def as_expr(value) -> ScalarExpr:
    if isinstance(value, ScalarExpr):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Const(float(value))
    raise ExprError(f"cannot use {value!r} in an expression")


def zvar(index: int) -> Var:
    return Var(index)


WVAR = W()


# ---------------------------------------------------------------- serialization


def expr_from_dict(data) -> ScalarExpr:
    if isinstance(data, str):
        return parse_expr(data)
    if not isinstance(data, dict):
        raise ExprError(f"expression node must be an object, got {type(data).__name__}")
    if "const" in data:
        return Const(float(data["const"]))
    if "var" in data:
        name = data["var"]
        if name == "w":
            return W()
        if isinstance(name, str) and name.startswith("z") and name[1:].isdigit():
            return Var(int(name[1:]))
        raise ExprError(f"unknown variable {name!r}")
    op = data.get("op")
    args = [expr_from_dict(a) for a in data.get("args", [])]
    arity = {"add": 2, "sub": 2, "mul": 2, "exp": 1, "pow": 1}
    if op not in arity:
        raise ExprError(f"unknown operation {op!r}")
    if len(args) != arity[op]:
        raise ExprError(f"{op} takes {arity[op]} argument(s), got {len(args)}")
    if op == "add":
        return Add(*args)
    if op == "sub":
        return Sub(*args)
    if op == "mul":
        return Mul(*args)
    if op == "exp":
        return Exp(args[0])
    power = data.get("power")
    if isinstance(power, bool) or not isinstance(power, int):
        raise ExprError(f"pow needs an integer 'power', got {power!r}")
    return Pow(args[0], power)


def parse_expr(text: str) -> ScalarExpr:
    """Parse infix text such as ``"z1**2 * (1 - z1) * w"``."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"cannot parse expression {text!r}: {exc.msg}") from None
    return _from_ast(tree.body, text)


def _from_ast(node, text):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return Const(float(node.value))
    if isinstance(node, ast.Name):
        return expr_from_dict({"var": node.id})
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise ExprError(f"exponent must be an integer literal in {text!r}")
            return Pow(_from_ast(node.left, text), node.right.value)
        ops = {ast.Add: Add, ast.Sub: Sub, ast.Mult: Mul}
        cls = ops.get(type(node.op))
        if cls is None:
            raise ExprError(f"operator {type(node.op).__name__} is not allowed in {text!r}")
        return cls(_from_ast(node.left, text), _from_ast(node.right, text))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "exp":
        if len(node.args) != 1 or node.keywords:
            raise ExprError("exp takes exactly one argument")
        return Exp(_from_ast(node.args[0], text))
    raise ExprError(f"unsupported syntax in {text!r}")


# ---------------------------------------------------------------- factoring


def divide_by_component(e: ScalarExpr, j: int) -> Optional[ScalarExpr]:
    """Return ``q`` with ``e == z_j * q`` syntactically, or None.

    Only literal factors are recognised: ``z_j`` itself, powers of a divisible
    term, products with a divisible factor, and sums/differences of divisible
    terms.
    """
    if isinstance(e, Var):
        return Const(1.0) if e.index == j else None
    if isinstance(e, Const):
        return Const(0.0) if e.value == 0.0 else None
    if isinstance(e, Pow):
        if e.k == 0:
            return None
        q = divide_by_component(e.a, j)
        if q is None:
            return None
        return _mul(q, Pow(e.a, e.k - 1) if e.k > 1 else Const(1.0))
    if isinstance(e, Mul):
        qa = divide_by_component(e.a, j)
        if qa is not None:
            return _mul(qa, e.b)
        qb = divide_by_component(e.b, j)
        if qb is not None:
            return _mul(e.a, qb)
        return None
    if isinstance(e, (Add, Sub)):
        qa = divide_by_component(e.a, j)
        qb = divide_by_component(e.b, j)
        if qa is None or qb is None:
            return None
        return type(e)(qa, qb)
    return None


def _mul(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    if a == Const(1.0):
        return b
    if b == Const(1.0):
        return a
    return Mul(a, b)
