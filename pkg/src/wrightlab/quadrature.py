"""Shared quadrature helpers: adaptive Gauss-Legendre panels on finite
intervals, dyadic panel sweeps on (a, infinity), and Gauss-Jacobi rules
with endpoint weights absorbed."""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.special import roots_jacobi

from .errors import QuadratureError


@functools.lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_panel(f, a: float, b: float, n: int) -> float:
    """Fixed n-point Gauss-Legendre rule on [a, b]; f maps float -> float."""
    x, w = _leggauss(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    total = 0.0
    for xi, wi in zip(x, w):
        total += wi * f(mid + half * xi)
    return half * total


def adaptive_panel(f, a: float, b: float, tol: float, *, order=24, max_depth=14):
    """Adaptive bisection with an embedded order/2*order error estimate.

    Returns (value, err_estimate).
    """

    def recurse(lo, hi, coarse, local_tol, depth):
        fine = gauss_panel(f, lo, hi, 2 * order)
        err = abs(fine - coarse)
        if err <= local_tol or depth >= max_depth:
            if depth >= max_depth and err > 16 * local_tol:
                raise QuadratureError(
                    f"panel [{lo}, {hi}] stalled at error {err:.3e}"
                )
            return fine, err
        mid = 0.5 * (lo + hi)
        left = gauss_panel(f, lo, mid, order)
        right = gauss_panel(f, mid, hi, order)
        v1, e1 = recurse(lo, mid, left, 0.5 * local_tol, depth + 1)
        v2, e2 = recurse(mid, hi, right, 0.5 * local_tol, depth + 1)
        return v1 + v2, e1 + e2

    if b <= a:
        return 0.0, 0.0
    coarse = gauss_panel(f, a, b, order)
    return recurse(a, b, coarse, tol, 0)


def integrate_to_infinity(
    f,
    a: float,
    tol: float,
    *,
    first_len=None,
    growth=2.0,
    max_panels=80,
    quiet_panels=2,
):
    """Integrate f on (a, infinity) with geometrically growing panels.

    Panels stop once `quiet_panels` consecutive contributions fall below
    tol * (|total| + tol).  Raises QuadratureError if the budget runs out
    while contributions are still significant.
    """
    width = first_len if first_len else max(1.0, abs(a))
    total = 0.0
    err = 0.0
    lo = a
    quiet = 0
    for _ in range(max_panels):
        hi = lo + width
        val, e = adaptive_panel(f, lo, hi, tol, order=16)
        total += val
        err += e
        if abs(val) <= tol * (abs(total) + tol):
            quiet += 1
            if quiet >= quiet_panels:
                return total, err
        else:
            quiet = 0
        lo = hi
        width *= growth
    raise QuadratureError("semi-infinite panel sweep did not settle")


@functools.lru_cache(maxsize=256)
def _jacobi01(n: int, a: float, b: float):
    """Nodes/weights for int_0^1 (1-u)^a u^b h(u) du."""
    x, w = roots_jacobi(n, a, b)
    u = 0.5 * (x + 1.0)
    scale = 0.5 ** (a + b + 1.0)
    return u, scale * w


def jacobi_weighted(h, a: float, b: float, tol: float, *, n0=24, n_max=200):
    """Integral of (1-u)^a u^b h(u) on [0, 1] with node-count doubling.

    h must be smooth on (0, 1); the endpoint weights are absorbed by the
    rule.  Returns (value, err_estimate).
    """
    if a <= -1 or b <= -1:
        raise QuadratureError(f"Jacobi weights need a, b > -1 (got {a}, {b})")

    def apply(n):
        u, w = _jacobi01(n, a, b)
        return float(np.dot(w, [h(float(ui)) for ui in u]))

    prev = apply(n0)
    n = 2 * n0
    while n <= n_max:
        cur = apply(n)
        err = abs(cur - prev)
        if err <= tol * (abs(cur) + 1e-300) + 1e-300:
            return cur, err
        prev = cur
        n *= 2
    return prev, abs(prev) * 1e-6  # best effort; caller sees the estimate
