"""Exterior (boundary) data: non-negative radial profiles on R^n.

Profiles are a closed family so that their supremum, their limsup at infinity
and their Laplacian are known exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


class ExteriorData:
    kind: str = ""

    def value(self, radius):
        """Profile value at distance ``radius`` from the origin (vectorised)."""
        raise NotImplementedError

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.value(np.sqrt((x * x).sum(axis=-1)))

    def laplacian(self, radius: float, dim: int) -> float:
        raise NotImplementedError

    @property
    def limsup_at_infinity(self) -> float:
        raise NotImplementedError

    @property
    def sup(self) -> float:
        raise NotImplementedError

    def sup_outside(self, radius: float) -> float:
        """Supremum over ``|x| >= radius``."""
        raise NotImplementedError

    def smooth_radius(self, radius: float) -> float:
        """A radius ``h`` such that the profile is C^2 on the ball B(x, h), |x| = radius."""
        return 1.0

    def kinks(self) -> tuple[float, ...]:
        """Radii across which the profile is not smooth."""
        return ()

    @property
    def support_radius(self) -> Optional[float]:
        """Radius outside which the profile equals its limsup, or None."""
        return None

    def is_constant(self) -> bool:
        return False

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantData(ExteriorData):
    level: float = 1.0
    kind = "constant"

    def __post_init__(self):
        _check_nonneg("value", self.level)

    def value(self, radius):
        return np.full(np.shape(radius), self.level) if np.ndim(radius) else self.level

    def laplacian(self, radius, dim):
        return 0.0

    @property
    def limsup_at_infinity(self):
        return self.level

    @property
    def sup(self):
        return self.level

    def sup_outside(self, radius):
        return self.level

    @property
    def support_radius(self):
        return 0.0

    def is_constant(self):
        return True

    def to_dict(self):
        return {"kind": "constant", "value": self.level}


@dataclass(frozen=True)
class GaussianData(ExteriorData):
    """``background + amplitude * exp(-|x|^2 / width^2)``."""

    amplitude: float = 1.0
    width: float = 1.0
    background: float = 0.0
    kind = "gaussian"

    def __post_init__(self):
        _check_nonneg("amplitude", self.amplitude)
        _check_nonneg("background", self.background)
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError(f"width must be positive, got {self.width}")

    def value(self, radius):
        return self.background + self.amplitude * np.exp(-(np.asarray(radius) / self.width) ** 2)

    def laplacian(self, radius, dim):
        l2 = self.width**2
        g = self.amplitude * math.exp(-radius**2 / l2)
        return g * (4 * radius**2 / l2**2 - 2 * dim / l2)

    @property
    def limsup_at_infinity(self):
        return self.background

    @property
    def sup(self):
        return self.background + self.amplitude

    def sup_outside(self, radius):
        return self.background + self.amplitude * math.exp(-(radius / self.width) ** 2)

    def smooth_radius(self, radius):
        return 0.5 * self.width

    def to_dict(self):
        return {"kind": "gaussian", "amplitude": self.amplitude, "width": self.width, "background": self.background}


@dataclass(frozen=True)
class PowerCapData(ExteriorData):
    """``amplitude * (cap_radius^2 - |x|^2)_+ ** power``.

    With ``power = s`` and the torsion constant as amplitude this is the
    torsion function of the ball of radius ``cap_radius``.  It is C^2 only
    away from ``|x| = cap_radius``.
    """

    amplitude: float = 1.0
    cap_radius: float = 1.0
    power: float = 1.0
    kind = "power_cap"

    def __post_init__(self):
        _check_nonneg("amplitude", self.amplitude)
        if not (self.cap_radius > 0 and self.power > 0):
            raise ValueError("cap_radius and power must be positive")

    def value(self, radius):
        base = np.clip(self.cap_radius**2 - np.asarray(radius, dtype=float) ** 2, 0.0, None)
        return self.amplitude * base**self.power

    def laplacian(self, radius, dim):
        q = self.cap_radius**2 - radius**2
        if q <= 0:
            return 0.0
        a, p = self.amplitude, self.power
        return -2 * a * p * dim * q ** (p - 1) + 4 * a * p * (p - 1) * radius**2 * q ** (p - 2)

    @property
    def limsup_at_infinity(self):
        return 0.0

    @property
    def sup(self):
        return self.amplitude * self.cap_radius ** (2 * self.power)

    def sup_outside(self, radius):
        return float(self.value(radius))

    def smooth_radius(self, radius):
        return 0.5 * abs(self.cap_radius - radius)

    def kinks(self):
        return (self.cap_radius,)

    @property
    def support_radius(self):
        return self.cap_radius

    def to_dict(self):
        return {"kind": "power_cap", "amplitude": self.amplitude, "radius": self.cap_radius, "power": self.power}


def _check_nonneg(name, value):
    if not (math.isfinite(value) and value >= 0):
        raise ValueError(f"{name} must be finite and non-negative, got {value!r}")


def exterior_from_dict(data: dict) -> ExteriorData:
    kind = data.get("kind")
    try:
        if kind == "constant":
            return ConstantData(float(data["value"]))
        if kind == "gaussian":
            return GaussianData(float(data["amplitude"]), float(data["width"]), float(data.get("background", 0.0)))
        if kind == "power_cap":
            return PowerCapData(float(data["amplitude"]), float(data["radius"]), float(data["power"]))
    except KeyError as exc:
        raise ValueError(f"exterior profile {kind!r} is missing field {exc.args[0]!r}") from None
    raise ValueError(f"unknown exterior profile kind {kind!r}")
