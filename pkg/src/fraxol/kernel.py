"""Analytic layer: special functions, the ball Green kernel, the torsion
function and the pointwise fractional Laplacian of radial data."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from fraxol.exterior import ExteriorData
from fraxol.geometry import BallDomain


class QuadratureError(RuntimeError):
    """A quadrature's error estimate exceeded the requested tolerance."""


def check_order(s: float) -> float:
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValueError(f"fractional order must lie in (0, 1), got {s}")
    return s


def gamma_fn(alpha: float) -> float:
    """Euler's gamma function on the positive half-line."""
    if not alpha > 0:
        raise ValueError(f"gamma_fn is defined here for alpha > 0 only, got {alpha}")
    return math.gamma(alpha)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^(n-1) in R^n."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def normalization_constant(n: int, s: float) -> float:
    """Constant ``c_{n,s}`` of the singular-integral form of ``(-Delta)^s``.

    Closed form ``s 4^s Gamma((n+2s)/2) / (pi^(n/2) Gamma(1-s))``; see
    :func:`normalization_constant_numeric` for the defining integral.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    s = check_order(s)
    return s * 4**s * gamma_fn((n + 2 * s) / 2) / (math.pi ** (n / 2) * gamma_fn(1 - s))


def normalization_constant_numeric(n: int, s: float) -> float:
    """Evaluate ``1 / int_{R^n} (1 - cos y_1) / |y|^(n+2s) dy`` by quadrature.

    Integrating out the n-1 transverse directions first gives
    ``|y_1|^(-1-2s) * J`` with ``J = |S^(n-2)| int_0^inf t^(n-2) (1+t^2)^(-(n+2s)/2) dt``;
    the remaining one-dimensional integral is split at 1 and its oscillatory
    tail handled by a Fourier-weighted rule.
    """
    s = check_order(s)
    if n == 1:
        transverse = 1.0
    else:
        s_n2 = 2.0 if n == 2 else sphere_area(n - 1)
        val, _ = integrate.quad(lambda t: t ** (n - 2) * (1 + t * t) ** (-(n + 2 * s) / 2), 0, np.inf, epsabs=1e-14, epsrel=1e-13)
        transverse = s_n2 * val
    # 1 - cos t written as 2 sin^2(t/2) to avoid cancellation near 0
    head, _ = integrate.quad(lambda t: 2 * math.sin(t / 2) ** 2 * t ** (-1 - 2 * s) if t > 0 else 0.0, 0, 1,
                             epsabs=1e-14, epsrel=1e-12, limit=200)
    cos_tail, _ = integrate.quad(lambda t: t ** (-1 - 2 * s), 1, np.inf, weight="cos", wvar=1.0)
    line = 2 * (head + 1 / (2 * s) - cos_tail)
    return 1.0 / (transverse * line)


# ------------------------------------------------------------------ Green kernel


def green_constant(n: int, s: float) -> float:
    return math.gamma(n / 2) / (4**s * math.pi ** (n / 2) * math.gamma(s) ** 2)


def riesz_constant(n: int, s: float) -> float:
    """Coefficient of the whole-space fundamental solution ``c |z|^(2s-n)``."""
    return math.gamma(n / 2 - s) / (4**s * math.pi ** (n / 2) * math.gamma(s))


def green_kernel(x, y, domain: BallDomain, s: float) -> np.ndarray:
    """Green function of ``(-Delta)^s`` on the ball, broadcast over points.

    ``G(x, y) = k |x-y|^(2s-n) int_0^{r0} t^(s-1) (1+t)^(-n/2) dt`` with
    ``r0 = (r^2-|x|^2)(r^2-|y|^2) / (r^2 |x-y|^2)``; zero when x or y is not in
    the open ball.  Coincident points give ``inf``.
    """
    s = check_order(s)
    n, r = domain.dim, domain.radius
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = (r * r - (x * x).sum(axis=-1)) * (r * r - (y * y).sum(axis=-1))
    diff = x - y
    d2 = (diff * diff).sum(axis=-1)
    b = n / 2 - s
    with np.errstate(divide="ignore", invalid="ignore"):
        r0 = dx / (r * r * d2)
        frac = np.where(np.isinf(r0), 1.0, r0 / (1 + r0))
        inner = special.beta(s, b) * special.betainc(s, b, np.clip(frac, 0.0, 1.0))
        out = green_constant(n, s) * d2 ** (s - n / 2) * inner
    inside = (dx > 0) & ((x * x).sum(axis=-1) < r * r)
    return np.where(inside, out, 0.0)


def green_kernel_value(x, y, domain: BallDomain, s: float) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (domain.dim,) or y.shape != (domain.dim,):
        raise ValueError(f"points must have shape ({domain.dim},)")
    if np.array_equal(x, y):
        raise ValueError("the Green kernel is singular at x = y")
    return float(green_kernel(x, y, domain, s))


def green_regular_diagonal(radius, domain: BallDomain, s: float):
    """Limit of ``fundamental solution - G`` as ``y -> x``, for ``|x| = radius``."""
    n, r = domain.dim, domain.radius
    q = r * r - np.asarray(radius, dtype=float) ** 2
    return green_constant(n, s) / (n / 2 - s) * (r / q) ** (n - 2 * s)


def riesz_potential_ball(radius: float, domain: BallDomain, s: float) -> float:
    """``int_B c |x-y|^(2s-n) dy`` for ``|x| = radius`` inside the ball.

    In polar coordinates about x the radial integral is explicit, leaving
    ``|S^(n-2)| int_0^pi rho_max(phi)^(2s) / (2s) sin^(n-2)(phi) dphi`` where
    ``rho_max`` is the distance from x to the sphere in direction phi.
    """
    n, r = domain.dim, domain.radius
    c = riesz_constant(n, s)
    if radius == 0.0:
        return c * sphere_area(n) * r ** (2 * s) / (2 * s)
    q = r * r - radius * radius

    def integrand(phi):
        cp = math.cos(phi)
        rho = -radius * cp + math.sqrt(radius * radius * cp * cp + q)
        return rho ** (2 * s) * math.sin(phi) ** (n - 2)

    val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=1e-14, epsrel=1e-13, limit=200)
    s_n2 = 2.0 if n == 2 else sphere_area(n - 1)
    return c * s_n2 * val / (2 * s)


# ---------------------------------------------------------------------- torsion


def torsion_constant(n: int, s: float) -> float:
    return 4 ** (-s) * math.gamma(n / 2) / (math.gamma((n + 2 * s) / 2) * math.gamma(1 + s))


def torsion_closed_form(x, domain: BallDomain, s: float):
    """Solution of ``(-Delta)^s v = 1`` in the ball, ``v = 0`` outside.

    Vectorised over the trailing axis of ``x``; a single point gives a float.
    """
    s = check_order(s)
    x = np.asarray(x, dtype=float)
    q = np.clip(domain.radius**2 - (x * x).sum(axis=-1), 0.0, None)
    out = torsion_constant(domain.dim, s) * q**s
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------ pointwise (-Delta)^s zeta


@dataclass(frozen=True)
class QuadControl:
    """Tolerances for :func:`frac_laplacian_pointwise`.

    ``taylor_radius`` caps the ball on which the second-order Taylor term is
    subtracted; ``max_error`` is the largest accepted total error estimate.
    """

    epsabs: float = 1e-11
    epsrel: float = 1e-10
    limit: int = 200
    taylor_radius: float = 0.25
    max_error: float = 1e-7


def frac_laplacian_pointwise(zeta: ExteriorData, x, s: float, quad: QuadControl = QuadControl()) -> float:
    """``(-Delta)^s zeta(x)`` for a radial profile, by split radial quadrature.

    Evaluates ``-(c/2) int (zeta(x+z) + zeta(x-z) - 2 zeta(x)) |z|^(-n-2s) dz``.
    The angular average of the second difference is a one-dimensional integral
    over the angle to ``x``.  Inside a small ball its Taylor term is removed and
    integrated exactly; beyond it the part tending to ``2 (limsup - zeta(x))``
    is integrated exactly and the rest numerically.

    Raises
    ------
    QuadratureError
        If the accumulated error estimate exceeds ``quad.max_error``.
    """
    s = check_order(s)
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    rx = float(np.sqrt(x @ x))
    g = zeta.value
    g0 = float(g(rx))
    ginf = float(zeta.limsup_at_infinity)
    area = sphere_area(n)
    s_n2 = 2.0 if n == 2 else sphere_area(n - 1)
    kinks = zeta.kinks()

    def angular(rho: float, ref: float) -> float:
        # integral over the unit sphere of zeta(x + rho*theta) + zeta(x - rho*theta) - 2 ref
        if rx == 0.0:
            return 2 * area * (float(g(rho)) - ref)

        def f(phi):
            d = math.sqrt(max(rx * rx + rho * rho + 2 * rho * rx * math.cos(phi), 0.0))
            return (float(g(d)) - ref) * math.sin(phi) ** (n - 2)

        pts = []
        for k in kinks:
            c = (k * k - rx * rx - rho * rho) / (2 * rho * rx)
            if -1.0 < c < 1.0:
                pts.append(math.acos(c))
        val, _ = integrate.quad(f, 0.0, math.pi, points=pts or None, epsabs=quad.epsabs * 1e-2, epsrel=quad.epsrel * 1e-2, limit=quad.limit)
        return 2 * s_n2 * val

    h = min(quad.taylor_radius, zeta.smooth_radius(rx))
    if not h > 0:
        raise QuadratureError(f"profile is not smooth near |x| = {rx}")
    taylor = area * zeta.laplacian(rx, n) / n
    total_err = 0.0

    def run(fun, a, b, points=None):
        nonlocal total_err
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(fun, a, b, points=points, epsabs=quad.epsabs, epsrel=quad.epsrel, limit=quad.limit)
        total_err += err
        return val

    # near field: Taylor-regularised; [0, h*1e-4] contributes O((1e-4 h)^(4-2s))
    eps = h * 1e-4
    near = run(lambda rho: (angular(rho, g0) - taylor * rho * rho) * rho ** (-1 - 2 * s), eps, h)
    near += taylor * h ** (2 - 2 * s) / (2 - 2 * s)

    # far field: constant part exactly, decaying part numerically
    far = 2 * area * (ginf - g0) * h ** (-2 * s) / (2 * s)
    support = zeta.support_radius
    if support is None:
        width = getattr(zeta, "width", 1.0)
        upper = rx + width * math.sqrt(45.0)
    else:
        upper = support + rx
    if upper > h and not zeta.is_constant():
        breaks = sorted({abs(k - rx) for k in kinks} | {k + rx for k in kinks})
        breaks = [b for b in breaks if h < b < upper]
        far += run(lambda rho: angular(rho, ginf) * rho ** (-1 - 2 * s), h, upper, points=breaks or None)

    if total_err > quad.max_error:
        raise QuadratureError(f"quadrature error estimate {total_err:.3g} exceeds {quad.max_error:.3g}")
    return -0.5 * normalization_constant(n, s) * (near + far)
