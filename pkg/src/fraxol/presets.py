"""The two worked examples on the unit disk.

Both share the functionals ``P_1 = int exp(u_2)``, ``P_2 = osc(u_1)``,
``B_1 = u_1(0) u_2(0)``, ``B_2 = limsup u_1`` and constant exterior data 1,
with orders 1/4 and 3/4.  They differ in ``f_1``: ``(1 - z1) w`` admits a
non-zero solution, ``z1^2 (1 - z1) w`` only the zero one for small parameters.
"""

from __future__ import annotations

from typing import Sequence

from fraxol.expr import parse_expr
from fraxol.exterior import ConstantData
from fraxol.geometry import BallDomain
from fraxol.model import ComponentSpec, IntegralOfExp, LimSup, Oscillation, PointProduct, SystemSpec

EXISTENCE_PARAMETERS = {"lambdas": (0.05, 1.0), "etas": (0.2, 0.5)}
NONEXISTENCE_PARAMETERS = {"lambdas": (0.1, 1.0), "etas": (0.0, 0.0)}
EXISTENCE_BOX = (0.5, 1.0)
NONEXISTENCE_BOX = (1.0, 1.0)


def _system(f1: str, lambdas: Sequence[float], etas: Sequence[float], resolution: int, box) -> SystemSpec:
    centre = (0.0, 0.0)
    one = ConstantData(1.0)
    c1 = ComponentSpec(0.25, lambdas[0], etas[0], parse_expr(f1), IntegralOfExp(2),
                       PointProduct(((1, centre), (2, centre))), one)
    c2 = ComponentSpec(0.75, lambdas[1], etas[1], parse_expr("z2 * w"), Oscillation(1), LimSup(1), one)
    return SystemSpec((c1, c2), BallDomain(2, 1.0), resolution, tuple(box))


def existence_example(lambdas=EXISTENCE_PARAMETERS["lambdas"], etas=EXISTENCE_PARAMETERS["etas"],
                      resolution: int = 32) -> SystemSpec:
    return _system("(1 - z1) * w", lambdas, etas, resolution, EXISTENCE_BOX)


def nonexistence_example(lambdas=NONEXISTENCE_PARAMETERS["lambdas"], etas=NONEXISTENCE_PARAMETERS["etas"],
                         resolution: int = 32) -> SystemSpec:
    return _system("z1**2 * (1 - z1) * w", lambdas, etas, resolution, NONEXISTENCE_BOX)


PRESETS = {"existence": existence_example, "nonexistence": nonexistence_example}
