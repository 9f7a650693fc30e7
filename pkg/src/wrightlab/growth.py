"""Order, type and indicator function of the Wright family.

These are closed formulas in (rho, beta); the numerical counterparts
(ray measurements, zero searches) live in :mod:`wrightlab.zeros`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

_HALF_FAMILY_TOL = 1e-12


@dataclass(frozen=True)
class GrowthData:
    """Order ``p`` and type ``sigma`` of an entire function."""

    p: float
    sigma: float


def order_type(rho: float) -> GrowthData:
    """Order 1/(1+rho) and type (1+rho)|rho|^(-rho/(1+rho)).

    The rho = 0 degeneracy (pure exponential) carries type 1, the
    limiting value.
    """
    if not rho > -1.0:
        raise DomainError(f"need rho > -1, got {rho}")
    p = 1.0 / (1.0 + rho)
    if rho == 0.0:
        sigma = 1.0
    else:
        sigma = (1.0 + rho) * abs(rho) ** (-rho / (1.0 + rho))
    return GrowthData(p=p, sigma=sigma)


def is_polynomial_family(rho, beta) -> bool:
    """True for the two rho = -1/2 families whose members are
    exp(-z^2/4) times a polynomial (finitely many zeros, no flat
    indicator sector)."""
    if abs(rho + 0.5) > _HALF_FAMILY_TOL:
        return False
    beta = complex(beta)
    if beta.imag != 0.0:
        return False
    b = beta.real
    for base in (0.0, 0.5):
        n = round(base - b)
        if n >= 0 and abs(base - n - b) <= _HALF_FAMILY_TOL:
            return True
    return False


def indicator_exact(rho: float, beta, theta: float) -> float:
    """Directional growth profile h(theta) of phi(rho, beta; .).

    Piecewise cosine in ``p * theta`` glued at the cut / the positive
    axis, with a flat zero sector once rho < -1/3 (except for the two
    polynomial families at rho = -1/2, which keep the two-piece form).
    """
    if abs(theta) > math.pi + 1e-12:
        raise DomainError(f"theta must lie in [-pi, pi], got {theta}")
    theta = min(max(theta, -math.pi), math.pi)
    beta = complex(beta)
    if rho == 0.0:
        if beta.imag == 0.0 and beta.real <= 0 and beta.real == round(beta.real):
            raise DomainError(
                "phi(0, -n; .) vanishes identically; no indicator"
            )
        return math.cos(theta)

    g = order_type(rho)
    p, sigma = g.p, g.sigma

    if rho > 0.0:
        return sigma * math.cos(p * theta)

    def glued(th):
        if th <= 0.0:
            return -sigma * math.cos(p * (math.pi + th))
        return -sigma * math.cos(p * (th - math.pi))

    if rho >= -1.0 / 3.0 or is_polynomial_family(rho, beta):
        return glued(theta)

    flat_edge = math.pi - 3.0 * math.pi / (2.0 * p)
    if abs(theta) <= flat_edge:
        return 0.0
    return glued(theta)
