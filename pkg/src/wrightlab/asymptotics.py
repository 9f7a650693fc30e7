"""Large-argument expansions of the Wright function.

Three building blocks cover the whole parameter range:

* ``H`` (rho > 0): exponentially large saddle contribution with
  coefficients ``a_m`` extracted from a formal power series.
* ``I`` (-1 < rho < 0): exponentially small/oscillatory contribution
  whose coefficients ``A_m`` are produced numerically -- the leading one
  by a Stirling limit, the rest by least squares in an inverse-Pochhammer
  basis (the source relation states they exist without giving a formula;
  the normalisation here is pinned by the exact Gaussian special cases).
* ``J``: the explicit algebraic series.

``region_classify`` picks the correct combination from (rho, arg z)
with a safety margin and refuses near sector boundaries.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np

from ._backend import resolve
from .core import EvalOutcome, WrightParams, _check_finite
from .errors import (
    AmbiguousRegion,
    DomainError,
    IllConditioned,
    NonAsymptotic,
)
from .gammakit import log_gamma

_COMBINATION = {
    "T211": "H(Z1)+H(Z2)",
    "T212": "H(Z)",
    "T213": "I(Y)",
    "T214": "I(Y1)+I(Y2)",
    "T215": "J",
    "T216": "I(Y1)+I(Y2)+J",
    "T217": "I(Y)+J",
}

_THIRD = 1.0 / 3.0


@dataclass(frozen=True)
class AsymptoticTerms:
    """Coefficient table for one expansion kind ("H", "I" or "J")."""

    kind: str
    coeffs: tuple
    order: int

    def __post_init__(self):
        if self.kind not in ("H", "I", "J"):
            raise DomainError(f"unknown expansion kind {self.kind!r}")
        if len(self.coeffs) != self.order + 1:
            raise DomainError("coefficient count must be order + 1")


@dataclass(frozen=True)
class RegionTag:
    theorem: str
    combination: str


# ---------------------------------------------------------------------------
# formal power series helpers (complex coefficients, fixed truncation)

def _ps_mul(p, q, order):
    out = [0j] * (order + 1)
    for i, pi in enumerate(p[: order + 1]):
        if pi == 0:
            continue
        for j, qj in enumerate(q[: order + 1 - i]):
            out[i + j] += pi * qj
    return out


def _ps_pow(p, a, order):
    """p(v)^a for a series with p[0] == 1 and arbitrary complex a."""
    if p[0] != 1:
        raise DomainError("power series exponentiation needs unit constant term")
    q = [0j] * (order + 1)
    q[0] = 1.0 + 0j
    for n in range(1, order + 1):
        s = 0j
        for k in range(1, n + 1):
            s += ((a + 1) * k - n) * p[k] * q[n - k]
        q[n] = s / n
    return q


# ---------------------------------------------------------------------------
# coefficient tables

@functools.lru_cache(maxsize=512)
def _coeffs_a_cached(rho: float, beta: complex, M: int):
    order = 2 * M
    # g(v)^2 = 1 + (rho+2)/3 v + (rho+2)(rho+3)/12 v^2 + ...
    inner = [1.0 + 0j]
    for k in range(1, order + 1):
        inner.append(inner[-1] * (rho + 1 + k) / (k + 2))
    binom = [1.0 + 0j]  # (1-v)^(-beta)
    for k in range(1, order + 1):
        binom.append(binom[-1] * (beta + k - 1) / k)
    out = []
    for m in range(M + 1):
        gpow = _ps_pow(inner, -(2 * m + 1) / 2.0, order)
        series = _ps_mul(binom, gpow, order)
        pref = (
            math.gamma(m + 0.5)
            / (2.0 * math.pi)
            * (2.0 / (rho + 1.0)) ** (m + 0.5)
        )
        out.append(pref * series[2 * m])
    return tuple(out)


def coeffs_a(params: WrightParams, M: int) -> AsymptoticTerms:
    """Coefficients a_m of the exponentially large expansion (rho > 0).

    a_m is the v^(2m) coefficient of
    Gamma(m+1/2)/(2 pi) (2/(rho+1))^(m+1/2) (1-v)^(-beta) g(v)^(-2m-1),
    computed by exact-order formal power series arithmetic.
    """
    if params.rho <= 0:
        raise DomainError("H-expansion coefficients need rho > 0")
    if not 0 <= M <= 12:
        raise DomainError("supported truncation order is 0..12")
    coeffs = _coeffs_a_cached(params.rho, complex(params.beta), M)
    return AsymptoticTerms(kind="H", coeffs=coeffs, order=M)


@functools.lru_cache(maxsize=512)
def _coeffs_A_cached(rho: float, beta: complex, M: int):
    a = -rho
    b = 1.0 + rho
    # Stirling limit of the defining gamma-ratio relation.  The leading
    # coefficient is pinned against the exact Gaussian cases
    # (rho=-1/2, beta in {0, 1/2}), which fixes the b-power as below.
    A0 = (
        cmath.exp((0.5 - beta) * math.log(a))
        * cmath.exp((beta - 1.0) * math.log(b))
        / math.sqrt(2.0 * math.pi)
    )
    if M == 0:
        return (A0,), 1.0
    n_pts = max(20, 4 * M + 10)
    ts = 6.0 * 1.45 ** np.arange(n_pts)
    xs = b * ts + beta + 0.5
    u = np.empty(n_pts, dtype=complex)
    for j, t in enumerate(ts):
        expo = (
            log_gamma(1.0 - beta + a * t)
            + log_gamma(b * t + beta + 0.5)
            - math.log(2.0 * math.pi)
            - a * t * math.log(a)
            - (b * t + 1.0) * math.log(b)
            - log_gamma(t + 1.0)
        )
        u[j] = cmath.exp(expo)
    rhs = u - A0
    cols = []
    for m in range(1, M + 1):
        poch = np.ones(n_pts, dtype=complex)
        for i in range(m):
            poch *= xs + i
        cols.append((-1.0) ** m / poch)
    mat = np.array(cols).T
    scale = np.linalg.norm(mat, axis=0)
    scale[scale == 0] = 1.0
    mat_s = mat / scale
    sol, _, _, sv = np.linalg.lstsq(mat_s, rhs, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if cond > 1e10:
        raise IllConditioned(
            f"A_m matching system condition number {cond:.3e}",
            condition_number=cond,
        )
    A = tuple([A0] + list(sol / scale))
    return A, cond


def coeffs_A(params: WrightParams, M: int) -> AsymptoticTerms:
    """Coefficients A_m of the exponentially small expansion
    (-1 < rho < 0).

    A_0 comes from the Stirling limit of the defining relation; higher
    coefficients by least squares on a geometric grid in the
    1/Gamma((1+rho)t + beta + 1/2 + m) basis.  Raises IllConditioned if
    the (column-scaled) matching system is numerically rank deficient.
    """
    if not -1.0 < params.rho < 0.0:
        raise DomainError("I-expansion coefficients need -1 < rho < 0")
    if not 0 <= M <= 8:
        raise DomainError("supported truncation order is 0..8")
    coeffs, _ = _coeffs_A_cached(params.rho, complex(params.beta), M)
    return AsymptoticTerms(kind="I", coeffs=coeffs, order=M)


def matching_condition_number(params: WrightParams, M: int) -> float:
    """Condition number reported by the A_m least-squares match."""
    _, cond = _coeffs_A_cached(params.rho, complex(params.beta), M)
    return cond


# ---------------------------------------------------------------------------
# sector dispatch

def region_classify(
    params: WrightParams, z, eps: float = 0.02, min_modulus: float = 20.0
) -> RegionTag:
    """Pick the applicable expansion combination from (rho, arg z).

    Raises AmbiguousRegion when the best sector margin is below eps
    (callers fall back to contour quadrature there).
    """
    z = _check_finite(z)
    rho = params.rho
    if rho == 0.0:
        raise DomainError("rho = 0 has no asymptotic sector structure")
    if abs(z) < min_modulus:
        raise DomainError(
            f"|z| = {abs(z):.3g} below asymptotic threshold {min_modulus}"
        )
    ang = cmath.phase(z)
    argy = cmath.phase(-z)

    def tag(name):
        return RegionTag(theorem=name, combination=_COMBINATION[name])

    if rho > 0.0:
        if math.pi - abs(ang) > eps:
            return tag("T212")
        return tag("T211")  # covers |arg(-z)| <= pi including boundary

    candidates = []
    bound213 = min(1.5 * math.pi * (1.0 + rho), math.pi)
    candidates.append(("T213", bound213 - abs(argy)))
    if rho > -_THIRD:
        candidates.append(("T214", math.pi * (1.0 + rho) - abs(ang)))
    if abs(rho + _THIRD) <= 1e-12:
        candidates.append(("T216", math.pi * (1.0 + rho) - abs(ang)))
    if rho < -_THIRD - 1e-12:
        phi_r = 0.5 * math.pi * (-1.0 - 3.0 * rho)
        candidates.append(("T215", phi_r - abs(ang)))
        candidates.append(
            ("T217", math.pi * (1.0 + rho) - min(abs(ang - phi_r), abs(ang + phi_r)))
        )
    name, margin = max(candidates, key=lambda c: c[1])
    if margin <= eps:
        raise AmbiguousRegion(
            f"arg z = {ang:.4f} within {eps} of every sector boundary "
            f"for rho = {rho}"
        )
    return tag(name)


# ---------------------------------------------------------------------------
# evaluation

def _eval_series_desc(ctx, base, coeffs, M):
    """sum_m c_m base^-m, plus |first omitted| and |last included|."""
    inv = ctx.to(1) / base
    acc = ctx.to(0)
    power = ctx.to(1)
    last_mag = 0.0
    for m in range(M + 1):
        term = ctx.to(coeffs[m]) * power
        acc = acc + term
        last_mag = ctx.mag(term)
        power = power * inv
    omitted = ctx.mag(ctx.to(coeffs[M + 1]) * power) if len(coeffs) > M + 1 else 0.0
    return acc, omitted, last_mag


def _mag_real(ctx, v):
    """|v| in the backend's real type (mpf survives out-of-double range)."""
    if ctx.name == "double":
        return ctx.mag(v)
    import mpmath

    return mpmath.fabs(v)


def _h_term(ctx, params, Z, table, M):
    rho = params.rho
    beta = ctx.to(params.beta)
    series, omitted, last = _eval_series_desc(
        ctx, Z, [c * (-1.0) ** m for m, c in enumerate(table.coeffs)], M
    )
    pref = ctx.power(Z, ctx.to(0.5) - beta) * ctx.exp(ctx.to((1.0 + rho) / rho) * Z)
    pmag = _mag_real(ctx, pref)
    return pref * series, pmag * omitted, pmag * last


def _i_term(ctx, params, Y, table, M):
    beta = ctx.to(params.beta)
    series, omitted, last = _eval_series_desc(ctx, Y, table.coeffs, M)
    pref = ctx.power(Y, ctx.to(0.5) - beta) * ctx.exp(-Y)
    pmag = _mag_real(ctx, pref)
    return pref * series, pmag * omitted, pmag * last


def _j_term(ctx, params, zc, M):
    rho = params.rho
    beta = complex(params.beta)
    acc = ctx.to(0)
    last = 0.0
    from .gammakit import reciprocal_gamma

    def term(m):
        expo = (beta - 1.0 - m) / (-rho)
        rg = reciprocal_gamma(1.0 + expo)
        return ctx.power(zc, ctx.to(expo)) * ctx.to(rg) / (
            (-rho) * math.factorial(m)
        )

    for m in range(M + 1):
        t = term(m)
        acc = acc + t
        last = ctx.mag(t)
    omitted = ctx.mag(term(M + 1))
    return acc, omitted, last


def j_series(params: WrightParams, M: int) -> AsymptoticTerms:
    """Explicit algebraic-series coefficients (values of the gamma
    factors; the z powers are applied at evaluation time)."""
    if not -1.0 < params.rho < -_THIRD:
        raise DomainError("J-series applies for -1 < rho < -1/3")
    from .gammakit import reciprocal_gamma

    beta = complex(params.beta)
    rho = params.rho
    coeffs = tuple(
        reciprocal_gamma(1.0 + (beta - 1.0 - m) / (-rho))
        / ((-rho) * math.factorial(m))
        for m in range(M + 1)
    )
    return AsymptoticTerms(kind="J", coeffs=coeffs, order=M)


def asymptotic_eval(
    params: WrightParams,
    z,
    M: int = 2,
    *,
    backend=None,
    dps=None,
    eps: float = 0.02,
    min_modulus: float = 20.0,
) -> EvalOutcome:
    """Evaluate phi by the sector-appropriate expansion combination.

    The error estimate is the magnitude of the first omitted term of
    every component; NonAsymptotic is raised when an omitted term
    exceeds the last included one (expansion not yet usable).
    """
    region = region_classify(params, z, eps=eps, min_modulus=min_modulus)
    ctx = resolve(backend, dps)
    z = _check_finite(z)
    rho = params.rho
    p_exp = 1.0 / (1.0 + rho)

    with ctx.workprec():
        zc = ctx.to(z)
        total = ctx.to(0)
        err = 0.0 if ctx.name == "double" else __import__("mpmath").mpf(0)
        checks = []

        def add(val, omitted, last):
            nonlocal total, err
            total = total + val
            err += omitted
            checks.append((omitted, last))

        if region.theorem in ("T211", "T212"):
            table = coeffs_a(params, min(M + 1, 12))
            scale = (rho * abs(z)) ** p_exp
            if region.theorem == "T212":
                Z = ctx.to(scale * cmath.exp(1j * cmath.phase(z) * p_exp))
                add(*_h_term(ctx, params, Z, table, M))
            else:
                xi = cmath.phase(-z)
                for sgn in (+1.0, -1.0):
                    Z = ctx.to(scale * cmath.exp(1j * (xi + sgn * math.pi) * p_exp))
                    add(*_h_term(ctx, params, Z, table, M))
        if region.theorem in ("T213", "T214", "T216", "T217"):
            table = coeffs_A(params, min(M + 1, 8))
            scale = (1.0 + rho) * ((-rho) ** (-rho) * abs(z)) ** p_exp
            if region.theorem in ("T213", "T217"):
                Y = ctx.to(scale * cmath.exp(1j * cmath.phase(-z) * p_exp))
                add(*_i_term(ctx, params, Y, table, M))
            else:
                ang = cmath.phase(z)
                for sgn in (+1.0, -1.0):
                    Y = ctx.to(scale * cmath.exp(1j * (ang + sgn * math.pi) * p_exp))
                    add(*_i_term(ctx, params, Y, table, M))
        if region.theorem in ("T215", "T216", "T217"):
            add(*_j_term(ctx, params, zc, M))

        for omitted, last in checks:
            if omitted > last and last > 0.0:
                raise NonAsymptotic(
                    f"first omitted term {omitted} exceeds last "
                    f"included {last} at |z| = {abs(z):.3g}"
                )
        abs_err = err
    return EvalOutcome(total, abs_err, "asymptotic", M + 1)


# ---------------------------------------------------------------------------
# real-axis oscillatory form

def real_axis_form(params: WrightParams, x: float, side: str):
    """Envelope/phase of the oscillatory large-x behaviour on the real
    axis, plus the overall constant fitted against contour quadrature.

    side="negative_arg" describes phi(rho, beta; -x) for rho > 0;
    side="positive_arg" describes phi(rho, beta; x) for -1/3 < rho < 0.
    Returns (envelope(x), phase(x), c_fit).
    """
    beta = complex(params.beta)
    if beta.imag != 0.0:
        raise DomainError("real-axis form needs real beta")
    b = beta.real
    rho = params.rho
    if side == "negative_arg":
        if rho <= 0:
            raise DomainError("negative_arg side needs rho > 0")
        sign = +1.0
    elif side == "positive_arg":
        if not -_THIRD < rho < 0.0:
            raise DomainError("positive_arg side needs -1/3 < rho < 0")
        sign = -1.0
    else:
        raise DomainError(f"unknown side {side!r}")
    if x <= 0:
        raise DomainError("x must be positive")
    from .growth import order_type

    g = order_type(rho)
    p, sigma = g.p, g.sigma

    def envelope(xx):
        return xx ** (p * (0.5 - b)) * math.exp(sign * sigma * xx**p * math.cos(math.pi * p))

    def phase(xx):
        return math.pi * p * (0.5 - b) + sign * sigma * xx**p * math.sin(math.pi * p)

    c_fit = _fit_axis_constant(params, side, envelope, phase)
    return envelope(x), phase(x), c_fit


def _fit_axis_constant(params, side, envelope, phase, x0: float = 60.0):
    from .core import phi_hankel

    import mpmath

    samples = []
    xx = x0
    attempts = 0
    while len(samples) < 6 and attempts < 60:
        attempts += 1
        c = math.cos(phase(xx))
        if abs(c) >= 0.35:
            arg = -xx if side == "negative_arg" else xx
            need_ext = abs(
                math.log(max(envelope(xx), 1e-300))
            ) > 600.0
            out = phi_hankel(
                params,
                arg,
                backend="extended" if need_ext else None,
                dps=40,
                rel_tol=1e-9,
            )
            val = out.value
            if isinstance(val, (mpmath.mpc, mpmath.mpf)):
                ratio = float(mpmath.re(val) / (mpmath.mpf(envelope(xx)) * c))
            else:
                ratio = val.real / (envelope(xx) * c)
            samples.append(ratio)
        xx *= 1.13
    if not samples:
        raise NonAsymptotic("could not find sampling points off the zeros")
    return float(np.median(samples))
