"""Laplace transforms of the per-road interference and their derivatives.

All transforms here are of the unscaled interference sum(h * r**-alpha) over
one road and one propagation class; the link-budget constant is folded into
the evaluation argument by the caller. For exponent 2 a closed form exists;
for any exponent above 1 the intensity integral is evaluated by adaptive
quadrature. Derivatives come from truncated Taylor arithmetic, plus the
power-of-first-derivative shortcut kept for comparison (exact only at first
order).
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

from scipy.integrate import IntegrationWarning, quad

from .errors import NumericalError
from .geometry import ROAD_X, ROAD_Y, NodePolar
from .taylor import TaylorScalar

# Absolute tolerance on the exponent integral.
EXPONENT_TOL = 1e-9


def road_offset(n: NodePolar, road: str) -> float:
    """Perpendicular distance from a node to a road axis."""
    if road == ROAD_X:
        return abs(n.m * math.sin(n.theta))
    if road == ROAD_Y:
        return abs(n.m * math.cos(n.theta))
    raise ValueError(f"unknown road {road!r}, expected 'X' or 'Y'")


def laplace_closed(s: float, p: float, lam: float, n: NodePolar, road: str) -> float:
    """Closed-form transform for path-loss exponent 2.

    exp(-p * lam * s * pi / sqrt(d^2 + s)) with d the perpendicular offset
    of the receiver from the road.
    """
    if s < 0.0:
        raise ValueError("s must be >= 0")
    if s == 0.0 or lam == 0.0 or p == 0.0:
        return 1.0
    d = road_offset(n, road)
    return math.exp(-p * lam * s * math.pi / math.sqrt(d * d + s))


@lru_cache(maxsize=4096)
def _exponent_coefficients(s: float, d: float, alpha: float, order: int) -> tuple[float, ...]:
    """Taylor coefficients in s of the intensity integral per unit p*lam.

    The integrand is f(x) = s / (s + w(x)) with w(x) = (d^2 + x^2)^(alpha/2).
    Coefficient k >= 1 of f in s is (-1)^(k+1) * w / (s + w)^(k+1), so each
    order costs one quadrature. The integrand is even, hence twice the
    half-line integral.
    """
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1 (divergent interference integral)")
    if s < 0.0:
        raise ValueError("s must be >= 0")
    if s == 0.0 and order >= 1 and d == 0.0:
        raise NumericalError("transform not differentiable at s=0 for an on-road receiver")

    scale = max(d, s ** (1.0 / alpha) if s > 0.0 else 0.0, 1.0)
    split = 50.0 * scale

    def integrate(f) -> float:
        total = 0.0
        err = 0.0
        # quad's own convergence warning is advisory; the hard gate is the
        # a-posteriori error bound checked below.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            for a, b in ((0.0, split), (split, math.inf)):
                val, abserr = quad(f, a, b, epsabs=1e-13, epsrel=1e-11, limit=200)
                total += val
                err += abserr
        if err > EXPONENT_TOL:
            raise NumericalError(
                f"exponent quadrature error {err:.2e} above {EXPONENT_TOL:.0e}"
            )
        return 2.0 * total

    coeffs = []
    for k in range(order + 1):
        if k == 0:
            if s == 0.0:
                coeffs.append(0.0)
                continue
            coeffs.append(integrate(lambda x: s / (s + (d * d + x * x) ** (alpha / 2.0))))
        else:
            sign = -1.0 if k % 2 == 0 else 1.0
            coeffs.append(
                sign
                * integrate(
                    lambda x: (d * d + x * x) ** (alpha / 2.0)
                    / (s + (d * d + x * x) ** (alpha / 2.0)) ** (k + 1)
                )
            )
    return tuple(coeffs)


def laplace_quadrature(
    s: float, p: float, lam: float, alpha: float, n: NodePolar, road: str
) -> float:
    """Transform for a general path-loss exponent via numeric integration."""
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1 (divergent interference integral)")
    if s < 0.0:
        raise ValueError("s must be >= 0")
    if s == 0.0 or lam == 0.0 or p == 0.0:
        return 1.0
    d = road_offset(n, road)
    (integral,) = _exponent_coefficients(s, d, alpha, 0)
    return math.exp(-p * lam * integral)


def laplace_taylor(
    order: int, s: float, p: float, lam: float, alpha: float, n: NodePolar, road: str
) -> TaylorScalar:
    """Taylor coefficients of the transform in s, up to `order`.

    Exponent 2 goes through closed-form Taylor algebra; other exponents
    differentiate under the integral sign, one quadrature per coefficient.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if lam == 0.0 or p == 0.0:
        return TaylorScalar.constant(1.0, order)
    d = road_offset(n, road)
    if alpha == 2.0:
        t = TaylorScalar.variable(s, order)
        exponent = t * (-p * lam * math.pi) / (t + d * d).sqrt()
        return exponent.exp()
    coeffs = _exponent_coefficients(s, d, alpha, order)
    exponent = TaylorScalar(tuple(-p * lam * c for c in coeffs))
    return exponent.exp()


def laplace_derivative_bracket_power(
    order: int, s: float, p: float, lam: float, n: NodePolar, road: str
) -> float:
    """Derivative shortcut that raises the first-order factor to a power.

    Returns (g'(s))**order * L(s) for L = exp(g). This equals the true
    derivative for order <= 1 only; higher orders drop the curvature terms.
    Kept so the gap against exact Taylor derivatives can be measured.
    """
    if s < 0.0:
        raise ValueError("s must be >= 0")
    d = road_offset(n, road)
    c = p * lam * math.pi
    root = math.sqrt(d * d + s)
    bracket = -c / root + 0.5 * c * s / root**3
    return bracket**order * laplace_closed(s, p, lam, n, road)
