"""Two-parameter Mittag-Leffler function E_{alpha,beta}.

Needed as the Laplace-domain image of Wright time profiles: the forward
transform of phi(rho, beta; -t) for -1 < rho < 0 is
E_{-rho, beta-rho}(-s), which the laplace module verifies numerically.

``ml_series`` is the defining power series with the same cancellation
monitoring as the Wright Taylor evaluator; ``ml_hankel`` quadratures
the loop integral  (1/2 pi i) int e^zeta zeta^(alpha-beta) / (zeta^alpha - z) dzeta
on the keyhole path, keeping the integrand pole away from the nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import resolve
from .contour import ContourSpec, keyhole_integral
from .core import EvalOutcome, _check_finite, _err_value, _log_mag
from .errors import (
    CancellationError,
    DomainError,
    NonConvergence,
    PoleOnContour,
)

_TINY = 1e-300


@dataclass(frozen=True)
class MLParams:
    """Parameter pair (alpha, beta) of E_{alpha,beta}."""

    alpha: float
    beta: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise DomainError(f"need alpha > 0, got {self.alpha}")
        _check_finite(self.beta)


def ml_series(
    params: MLParams,
    z,
    tol: float = 1e-15,
    *,
    backend=None,
    dps=None,
    max_terms: int = 200_000,
) -> EvalOutcome:
    """sum_k z^k / Gamma(alpha k + beta) with cancellation monitoring.

    Raises CancellationError once the estimated relative error passes
    1e-4 (switch to ml_hankel).
    """
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    z = _check_finite(z)
    ctx = resolve(backend, dps)
    alpha = params.alpha
    kmin = min(10 + int(2.0 * max(1.0, abs(z)) ** (1.0 / alpha)), max_terms // 4)
    with ctx.workprec():
        zc = ctx.to(z)
        beta = ctx.to(params.beta)
        alpha_c = ctx.to(alpha).real if ctx.name == "extended" else alpha
        acc = ctx.rgamma(beta)
        zpow = ctx.to(1)
        ln_eps = math.log(ctx.eps)
        max_lg = _log_mag(ctx, acc)
        small = 0
        k = 0
        while k < max_terms:
            k += 1
            try:
                zpow = zpow * zc
                term = zpow * ctx.rgamma(beta + alpha_c * k)
            except OverflowError as exc:
                raise CancellationError(
                    f"series term overflow at k={k}; switch methods"
                ) from exc
            acc = acc + term
            lg = _log_mag(ctx, term)
            max_lg = max(max_lg, lg)
            acc_lg = _log_mag(ctx, acc)
            if acc_lg == -math.inf:
                acc_lg = ln_eps + max_lg
            if max_lg + ln_eps - acc_lg > math.log(1e-4) and k > 4:
                raise CancellationError(
                    f"Mittag-Leffler series lost too many digits at k={k}",
                    est_rel_err=math.exp(
                        min(700.0, max_lg + ln_eps - acc_lg)
                    ),
                )
            if ctx.mag(term) <= tol * (ctx.mag(acc) + _TINY):
                small += 1
                if small >= 3 and k >= kmin:
                    break
            else:
                small = 0
        else:
            raise NonConvergence(
                f"Mittag-Leffler series did not settle in {max_terms} terms"
            )
        trunc = 3.0 * tol * (ctx.mag(acc) + _TINY)
        abs_err = _err_value(ctx, trunc, max_lg + 0.5 * math.log(max(k, 1)), ln_eps)
    return EvalOutcome(acc, abs_err, "taylor", k)


def ml_hankel(
    params: MLParams,
    z,
    spec: Optional[ContourSpec] = None,
    *,
    backend=None,
    dps=None,
    rel_tol: float = 1e-11,
) -> EvalOutcome:
    """Keyhole quadrature of the loop-integral representation.

    The contour radius is rescaled once (by |z|^(1/alpha)) if the
    integrand pole zeta^alpha = z approaches the discretised path;
    PoleOnContour follows if it is still too close.  The documented
    support envelope is alpha >= 0.2, |z| <= 100.
    """
    z = _check_finite(z)
    alpha = params.alpha
    beta = complex(params.beta)
    if alpha < 0.2:
        raise DomainError("supported envelope is alpha >= 0.2")
    if abs(z) > 100.0:
        raise DomainError("supported envelope is |z| <= 100")
    ctx = resolve(backend, dps)
    theta = spec.cut_hug_angle if spec is not None else 0.95 * math.pi
    nodes0 = spec.node_count if spec is not None else (96 if ctx.name == "extended" else 256)
    sep = 1e-8 * (1.0 + abs(z))

    class _PoleNear(Exception):
        pass

    def scan_hook(zetas):
        za = np.exp(alpha * np.log(zetas))
        if np.min(np.abs(za - z)) < sep:
            raise _PoleNear()

    def w_vec(zetas):
        lz = np.log(zetas)
        return zetas + (alpha - beta) * lz - np.log(np.exp(alpha * lz) - z)

    def w_scalar(zeta, c):
        lz = c.log(zeta)
        return zeta + c.to(alpha - beta) * lz - c.log(c.exp(c.to(alpha) * lz) - c.to(z))

    # roots of zeta^alpha = z on the principal sheet must stay enclosed
    # by the circle, otherwise the loop representation drops a residue
    import cmath

    onsheet = any(
        abs((cmath.phase(z) + 2.0 * math.pi * k) / alpha) < math.pi - 1e-9
        for k in range(-3, 4)
    ) if z != 0 else False
    base = max(1.0, 1.5 * abs(z) ** (1.0 / alpha)) if onsheet else 1.0
    radii = [spec.radius] if spec is not None else [base]
    radii.append(1.5 * max(1.0, abs(z)) ** (1.0 / alpha) + 1.0)
    last_exc = None
    for r0 in radii:
        try:
            with ctx.workprec():
                value, abs_err, nodes = keyhole_integral(
                    w_vec,
                    r0,
                    theta,
                    ctx=ctx,
                    w_scalar=w_scalar,
                    initial_nodes=nodes0,
                    rel_tol=rel_tol,
                    max_nodes=32768 if ctx.name == "double" else 8192,
                    scan_hook=scan_hook,
                )
            return EvalOutcome(value, abs_err, "hankel", nodes)
        except _PoleNear as exc:
            last_exc = exc
            continue
    raise PoleOnContour(
        f"integrand pole within {sep:.1e} of the contour for "
        f"alpha={alpha}, z={z}"
    ) from last_exc
