"""Wright function evaluators.

``phi_taylor`` sums the defining power series with cancellation
monitoring, ``phi_hankel`` quadratures the loop-integral representation
on a cut-hugging keyhole contour, ``phi_closed_form`` covers the exact
special families, ``phi_rational_reduction`` rewrites positive rational
rho through generalized hypergeometric series, and ``phi_eval``
dispatches between all of them (escalating to the extended backend when
doubles run out of digits).  The Mainardi kernels are thin wrappers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from . import growth
from ._backend import resolve
from .contour import ContourSpec, keyhole_integral
from .errors import (
    CancellationError,
    DomainError,
    EvaluationFailure,
    NonConvergence,
    ParameterError,
    QuadratureDivergence,
)

_LN10 = math.log(10.0)
_METHODS = ("taylor", "hankel", "asymptotic", "closed_form", "hyper_reduction")
_TINY = 1e-300


def _check_finite(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"argument must be finite, got {z}")
    return z


@dataclass(frozen=True)
class WrightParams:
    """Parameter pair (rho, beta) of one Wright function instance."""

    rho: float
    beta: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho > -1.0):
            raise DomainError(f"need finite rho > -1, got {self.rho}")
        _check_finite(self.beta)

    def shifted(self, amount=None):
        """Parameters of the derivative family: beta -> beta + rho."""
        step = self.rho if amount is None else amount
        return WrightParams(self.rho, complex(self.beta) + step)


@dataclass
class EvalOutcome:
    """Value plus an honest absolute-error estimate and the method tag.

    ``value`` is a ``complex`` on the double backend and an
    ``mpmath.mpc`` on the extended one; ``abs_err`` follows suit
    (float / mpf) so that out-of-double-range results keep a meaningful
    error.
    """

    value: object
    abs_err: object
    method: str
    terms_or_nodes: int

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")

    def rel_err(self) -> float:
        """abs_err / |value| as a float (inf if value is zero)."""
        import mpmath

        if isinstance(self.value, (mpmath.mpc, mpmath.mpf)):
            mag = mpmath.fabs(self.value)
            if mag == 0:
                return math.inf
            try:
                return float(self.abs_err / mag)
            except OverflowError:
                return math.inf
        mag = abs(complex(self.value))
        if mag == 0.0:
            return math.inf if float(self.abs_err) > 0 else 0.0
        return float(self.abs_err) / mag


def _log_mag(ctx, v) -> float:
    m = ctx.mag(v)
    if m == 0.0:
        return -math.inf
    if math.isinf(m):
        if ctx.name == "extended":
            import mpmath

            return float(mpmath.log(mpmath.fabs(v)))
        return math.inf
    return math.log(m)


# ---------------------------------------------------------------------------
# series magnitude profile (double precision, used for dispatch decisions)

def _ln_abs_gamma_real(x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x > 0.5
    out[pos] = gammaln(x[pos])
    neg = ~pos
    if neg.any():
        s = np.abs(np.sin(np.pi * x[neg]))
        s = np.maximum(s, 1e-300)
        out[neg] = math.log(math.pi) - np.log(s) - gammaln(1.0 - x[neg])
    return out


def _series_profile(rho: float, beta_re: float, absz: float, k_cap=2_000_000):
    """(k_star, ln_max_term) of the Taylor series at |z| = absz."""
    if absz <= 0.0:
        return 0, float(-_ln_abs_gamma_real(np.array([beta_re]))[0])
    ks = np.unique(np.round(np.geomspace(1.0, k_cap, 400)).astype(np.int64))
    lnz = math.log(absz)

    def ln_terms(karr):
        karr = karr.astype(float)
        return (
            karr * lnz
            - gammaln(karr + 1.0)
            - _ln_abs_gamma_real(rho * karr + beta_re)
        )

    vals = ln_terms(ks)
    i = int(np.argmax(vals))
    lo = ks[max(0, i - 1)]
    hi = ks[min(len(ks) - 1, i + 1)]
    fine = np.arange(lo, hi + 1, max(1, (hi - lo) // 512))
    vfine = ln_terms(fine)
    j = int(np.argmax(vfine))
    k0 = float(-_ln_abs_gamma_real(np.array([beta_re]))[0])
    ln_max = max(float(vfine[j]), k0)
    return int(fine[j]), ln_max


def _scale_estimate(params: WrightParams, z: complex) -> float:
    """Heuristic ln|phi| from the indicator formula; dispatch only."""
    if abs(z) < 1e-12:
        return 0.0
    g = growth.order_type(params.rho)
    theta = cmath.phase(z)
    try:
        h = growth.indicator_exact(params.rho, complex(params.beta).real, theta)
    except DomainError:
        h = g.sigma
    return h * abs(z) ** g.p


# ---------------------------------------------------------------------------
# Taylor series

def phi_taylor(
    params: WrightParams,
    z,
    tol: float = 1e-15,
    *,
    backend=None,
    dps=None,
    max_terms: int = 200_000,
) -> EvalOutcome:
    """Partial sum of sum_k z^k / (k! Gamma(rho k + beta)).

    Stops once three consecutive terms drop below ``tol`` relative to
    the running sum (past the expected maximal-term index).  The error
    field combines the truncation tail with a cancellation floor of
    max-term magnitude times unit roundoff.

    Raises
    ------
    CancellationError
        When the estimated relative error exceeds 1e-4; callers should
        switch to the contour or asymptotic evaluators.
    """
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    z = _check_finite(z)
    ctx = resolve(backend, dps)
    rho = params.rho
    absz = abs(z)
    kmin = min(
        10 + int(2.0 * max(1.0, absz) ** (1.0 / (1.0 + rho))),
        max(16, max_terms // 4),
    )
    with ctx.workprec():
        zc = ctx.to(z)
        beta = ctx.to(params.beta)
        # keep rho * k in backend arithmetic: a float product would
        # jitter the near-pole gamma arguments for rational rho and
        # destroy the cancellation structure of the series
        rho_c = ctx.to(rho).real if ctx.name == "extended" else rho
        acc = ctx.rgamma(beta)
        pref = ctx.to(1)  # z^k / k!
        ln_eps = math.log(ctx.eps)
        max_lg = _log_mag(ctx, acc)
        last_nonzero = ctx.mag(acc)
        small = 0
        k = 0
        while k < max_terms:
            k += 1
            try:
                pref = pref * zc / k
                term = pref * ctx.rgamma(beta + rho_c * k)
            except OverflowError as exc:
                raise CancellationError(
                    f"series term overflow at k={k}; switch methods"
                ) from exc
            acc = acc + term
            tmag = ctx.mag(term)
            lg = _log_mag(ctx, term)
            if lg > max_lg:
                max_lg = lg
            if tmag > 0.0:
                last_nonzero = tmag
            acc_lg = _log_mag(ctx, acc)
            if acc_lg == -math.inf:
                acc_lg = ln_eps + max_lg
            est_cancel = max_lg + ln_eps - acc_lg
            if est_cancel > math.log(1e-4) and k > 4:
                raise CancellationError(
                    "series lost too many digits "
                    f"(est rel err ~ e^{est_cancel:.1f}) at k={k}",
                    est_rel_err=math.exp(min(700.0, est_cancel)),
                )
            if tmag <= tol * (ctx.mag(acc) + _TINY):
                small += 1
                if small >= 3 and k >= kmin:
                    break
            else:
                small = 0
        else:
            raise NonConvergence(
                f"Taylor series did not settle within {max_terms} terms"
            )
        trunc = 3.0 * tol * (ctx.mag(acc) + _TINY)
        # rounding accumulates over ~k same-scale terms, not just one
        abs_err = _err_value(ctx, trunc, max_lg + 0.5 * math.log(max(k, 1)), ln_eps)
    return EvalOutcome(value=acc, abs_err=abs_err, method="taylor", terms_or_nodes=k)


def _err_value(ctx, trunc: float, max_lg: float, ln_eps: float):
    """truncation + e^(max_lg)*eps, in the backend's real type."""
    if ctx.name == "double":
        floor = math.exp(min(700.0, max_lg + ln_eps)) if max_lg > -math.inf else 0.0
        return trunc + floor
    import mpmath

    floor = mpmath.exp(max_lg + ln_eps) if max_lg > -math.inf else mpmath.mpf(0)
    return mpmath.mpf(trunc) + floor


# ---------------------------------------------------------------------------
# generalized hypergeometric series

def _nonpositive_int(c: complex) -> Optional[int]:
    if c.imag == 0.0 and c.real <= 0.0 and c.real == round(c.real):
        return int(-c.real)
    return None


def hyper_pfq(
    upper,
    lower,
    z,
    tol: float = 1e-15,
    *,
    backend=None,
    dps=None,
    max_terms: int = 100_000,
):
    """Generalized hypergeometric pFq by direct term recursion.

    Terminates exactly when an upper parameter is a non-positive
    integer.  Raises ParameterError for a non-positive-integer lower
    parameter that the series actually reaches, and NonConvergence
    outside the convergence domain (p > q+1, or p = q+1 with |z| >= 1,
    non-terminating).
    """
    z = _check_finite(z)
    upper = [_check_finite(a) for a in upper]
    lower = [_check_finite(b) for b in lower]
    stops = [n for n in (_nonpositive_int(a) for a in upper) if n is not None]
    n_stop = min(stops) if stops else None
    for b in lower:
        m = _nonpositive_int(b)
        if m is not None and (n_stop is None or n_stop > m):
            raise ParameterError(
                f"lower parameter {b} makes the series undefined"
            )
    p, q = len(upper), len(lower)
    if n_stop is None and z != 0:
        if p > q + 1:
            raise NonConvergence(
                f"{p}F{q} diverges for all z != 0 without termination"
            )
        if p == q + 1 and abs(z) >= 1.0:
            raise NonConvergence(f"{p}F{q} series diverges for |z| >= 1")
    ctx = resolve(backend, dps)
    with ctx.workprec():
        zc = ctx.to(z)
        term = ctx.to(1)
        acc = ctx.to(1)
        kmin = 8 + int(2.0 * abs(z))
        small = 0
        k = 0
        while k < max_terms:
            if n_stop is not None and k >= n_stop:
                break
            num = ctx.to(1)
            for a in upper:
                num = num * (ctx.to(a) + k)
            den = ctx.to(1)
            for b in lower:
                den = den * (ctx.to(b) + k)
            term = term * num / den * zc / (k + 1)
            acc = acc + term
            k += 1
            if ctx.mag(term) <= tol * (ctx.mag(acc) + _TINY):
                small += 1
                if small >= 3 and (k >= kmin or n_stop is not None):
                    break
            else:
                small = 0
        else:
            raise NonConvergence(
                f"pFq did not settle within {max_terms} terms"
            )
    return acc


# ---------------------------------------------------------------------------
# closed forms

_AIRY_C1 = 0.3550280538878172  # Ai(0)  = 3^(-2/3) / Gamma(2/3)
_AIRY_C2 = 0.2588194037928068  # -Ai'(0) = 3^(-1/3) / Gamma(1/3)


def _airy_series(w, ctx, fail_tol=1e-12):
    """Ai(w) by its Maclaurin series; None if cancellation eats it."""
    wc = ctx.to(w)
    w3 = wc * wc * wc
    f = ctx.to(1)
    g = wc
    tf = ctx.to(1)
    tg = wc
    max_lg = max(_log_mag(ctx, tf), _log_mag(ctx, tg))
    for k in range(1, 4000):
        tf = tf * w3 / ((3 * k) * (3 * k - 1))
        tg = tg * w3 / ((3 * k + 1) * (3 * k))
        f = f + tf
        g = g + tg
        max_lg = max(max_lg, _log_mag(ctx, tf), _log_mag(ctx, tg))
        if (
            ctx.mag(tf) <= 1e-18 * (ctx.mag(f) + _TINY)
            and ctx.mag(tg) <= 1e-18 * (ctx.mag(g) + _TINY)
        ):
            break
    value = ctx.to(_AIRY_C1) * f - ctx.to(_AIRY_C2) * g
    floor = max_lg + math.log(ctx.eps) - _log_mag(ctx, value)
    if floor > math.log(fail_tol):
        return None, None
    return value, math.exp(min(700.0, max_lg + math.log(ctx.eps)))


def phi_closed_form(params: WrightParams, z, *, backend=None, dps=None):
    """Exact special families, or None when none applies.

    Covers rho = 0 (scaled exponential), rho = -1/2 with beta in
    {-n, 1/2-n} (Gaussian times a polynomial) and rho = -1/3 with
    beta = 2/3 (Airy function via its own Maclaurin series).
    """
    z = _check_finite(z)
    ctx = resolve(backend, dps)
    rho = params.rho
    beta = complex(params.beta)
    with ctx.workprec():
        if rho == 0.0:
            val = ctx.exp(ctx.to(z)) * ctx.rgamma(ctx.to(beta))
            err = 8.0 * ctx.eps * ctx.mag(val)
            return EvalOutcome(val, err, "closed_form", 1)
        if abs(rho + 0.5) <= 1e-14 and beta.imag == 0.0:
            b = beta.real
            for base, c_den in ((0.0, 1.5), (0.5, 0.5)):
                n = round(base - b)
                if n >= 0 and abs(base - n - b) <= 1e-12:
                    return _half_family(ctx, z, int(n), base, c_den)
        if abs(rho + 1.0 / 3.0) <= 1e-14 and beta.imag == 0.0:
            if abs(beta.real - 2.0 / 3.0) <= 1e-12:
                w = ctx.to(-z) / ctx.to(3.0 ** (1.0 / 3.0))
                ai, err = _airy_series(w, ctx)
                if ai is None:
                    return None
                val = ctx.to(3.0 ** (2.0 / 3.0)) * ai
                return EvalOutcome(
                    val, 3.0 ** (2.0 / 3.0) * err + 4 * ctx.eps * ctx.mag(val),
                    "closed_form", 1,
                )
    return None


def _half_family(ctx, z, n, base, c_den):
    """exp(-z^2/4) * {z P_n(z^2) | Q_n(z^2)} via terminating 1F1."""
    zc = ctx.to(z)
    u = zc * zc
    if base == 0.0:
        # beta = -n family
        coef = ((-1.0) ** (n + 1) / math.pi) * math.gamma(1.5 + n)
        poly = hyper_pfq([-float(n)], [1.5], u / 4.0, backend=ctx)
        val = ctx.exp(-u / 4.0) * zc * ctx.to(coef) * poly
    else:
        # beta = 1/2 - n family
        coef = ((-1.0) ** n / math.pi) * math.gamma(0.5 + n)
        poly = hyper_pfq([-float(n)], [0.5], u / 4.0, backend=ctx)
        val = ctx.exp(-u / 4.0) * ctx.to(coef) * poly
    err = (8.0 + 2.0 * n) * ctx.eps * ctx.mag(val)
    return EvalOutcome(val, err, "closed_form", n + 1)


# ---------------------------------------------------------------------------
# rational-rho hypergeometric reduction

def phi_rational_reduction(
    params: WrightParams,
    z,
    *,
    numerator: int,
    denominator: int,
    tol: float = 1e-14,
    backend=None,
    dps=None,
) -> EvalOutcome:
    """phi(n/m, beta; z) as a sum of m generalized hypergeometric terms.

    The caller asserts rho = numerator/denominator with positive
    coprime integers; no float sniffing happens here.
    """
    n, m = int(numerator), int(denominator)
    if n <= 0 or m <= 0:
        raise DomainError("numerator and denominator must be positive")
    if math.gcd(n, m) != 1:
        raise DomainError(f"{n}/{m} is not in lowest terms")
    if abs(params.rho - n / m) > 1e-12:
        raise DomainError(
            f"params.rho={params.rho} does not match {n}/{m}"
        )
    z = _check_finite(z)
    ctx = resolve(backend, dps)
    beta = complex(params.beta)
    with ctx.workprec():
        zc = ctx.to(z)
        arg = ctx.power(zc, m) / ctx.to(float(m) ** m * float(n) ** n)
        total = ctx.to(0)
        abs_parts = 0.0
        terms = 0
        for p_idx in range(m):
            lower = [beta / n + i / n + p_idx / m for i in range(n)]
            delta_star = [
                (p_idx + 1) / m + i / m for i in range(m)
            ]
            unit = [c for c in delta_star if abs(c - 1.0) <= 1e-12]
            if not unit:
                raise ParameterError(
                    "Delta*(m, (p+1)/m) must contain the element 1"
                )
            delta_star = [c for c in delta_star if abs(c - 1.0) > 1e-12]
            fval = hyper_pfq(
                [], lower + delta_star, arg, tol=tol, backend=ctx
            )
            pref = ctx.power(zc, p_idx) * ctx.rgamma(
                ctx.to(beta + n * p_idx / m)
            ) / math.factorial(p_idx)
            part = pref * fval
            total = total + part
            abs_parts += ctx.mag(part)
            terms += 1
        err = (20.0 * m) * ctx.eps * (abs_parts + _TINY)
    return EvalOutcome(total, err, "hyper_reduction", terms)


# ---------------------------------------------------------------------------
# contour evaluation

def _auto_contour(rho: float, z: complex, theta: float):
    """Radius and saddle-angle hints for the keyhole path."""
    absz = abs(z)
    if absz < 1e-12:
        return 1.0, []
    w = rho * z
    base = (abs(rho) * absz) ** (1.0 / (1.0 + rho))
    arg_w = cmath.phase(w)
    hints = []
    for k in range(-4, 5):
        a = (arg_w + 2.0 * math.pi * k) / (1.0 + rho)
        if abs(a) <= theta - 0.02:
            hints.append(a)
    if hints:
        return max(1.0, base), hints
    # no reachable saddle (rho < 0 with z near the positive axis):
    # keep |z zeta^{-rho}| modest on the circle
    r0 = min(1.0, (10.0 / absz) ** (1.0 / (-rho))) if rho < 0 else 1.0
    return max(r0, 1e-7), []


def phi_hankel(
    params: WrightParams,
    z,
    spec: Optional[ContourSpec] = None,
    *,
    backend=None,
    dps=None,
    rel_tol: float = 1e-11,
) -> EvalOutcome:
    """Loop-integral evaluation of phi on the keyhole contour.

    The integrand is exp(zeta + z zeta^(-rho)) zeta^(-beta) on the
    principal branch; the path never touches the cut.  The error field
    comes from trapezoid node doubling plus a roundoff floor scaled by
    the largest integrand magnitude seen.
    """
    if params.rho == 0.0:
        raise DomainError("rho = 0 reduces to the exponential; no contour needed")
    z = _check_finite(z)
    ctx = resolve(backend, dps)
    rho = params.rho
    beta = complex(params.beta)
    theta = spec.cut_hug_angle if spec is not None else 0.95 * math.pi
    if spec is not None:
        r0 = spec.radius
        hints = _auto_contour(rho, z, theta)[1]
        nodes0 = spec.node_count
    else:
        r0, hints = _auto_contour(rho, z, theta)
        nodes0 = 96 if ctx.name == "extended" else 256

    def w_vec(zetas):
        lz = np.log(zetas)
        return zetas + z * np.exp(-rho * lz) - beta * lz

    def w_scalar(zeta, c):
        lz = c.log(zeta)
        return zeta + c.to(z) * c.exp(-rho * lz) - c.to(beta) * lz

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
            hint_angles=hints,
        )
    return EvalOutcome(value, abs_err, "hankel", nodes)


# ---------------------------------------------------------------------------
# dispatcher

def phi_derivative(params: WrightParams, z, **kwargs) -> EvalOutcome:
    """d/dz phi(rho, beta; z), which is phi(rho, beta + rho; z)
    term by term."""
    return phi_eval(params.shifted(), z, **kwargs)


def phi_eval(
    params: WrightParams,
    z,
    *,
    rel_tol: float = 1e-12,
    backend=None,
    dps=None,
    dps_cap: int = 320,
) -> EvalOutcome:
    """Evaluate phi(rho, beta; z), choosing the method automatically.

    Order of attack: exact closed forms, Taylor inside its trust region
    (double first, extended when cancellation estimates allow), the
    large-argument expansions once the sector dispatch is unambiguous,
    then keyhole quadrature with backend escalation.  The outcome's
    method tag reflects the path actually taken; every candidate keeps
    an honest error field and the best one is returned even if the
    requested tolerance was not met (EvaluationFailure only when every
    strategy errors out).
    """
    z = _check_finite(z)
    candidates = []

    def accept(out):
        candidates.append(out)
        return out.rel_err() <= rel_tol

    cf = phi_closed_form(params, z, backend=backend, dps=dps)
    if cf is not None and accept(cf):
        return cf
    if params.rho == 0.0 and cf is not None:
        return cf

    absz = abs(z)
    beta_re = complex(params.beta).real
    kstar, ln_max = _series_profile(params.rho, beta_re, absz)
    ln_scale = _scale_estimate(params, z)
    cancel_digits = max(0.0, ln_max - ln_scale) / _LN10

    if cancel_digits <= 8.0 and kstar <= 150_000:
        try:
            out = phi_taylor(params, z, tol=min(rel_tol, 1e-15), backend=backend, dps=dps)
            if accept(out):
                return out
        except (CancellationError, NonConvergence, OverflowError):
            pass
    if cancel_digits <= 140.0 and kstar <= 12_000:
        dps_t = int(25 + 1.1 * cancel_digits - math.log10(rel_tol))
        try:
            out = phi_taylor(
                params, z, tol=min(rel_tol, 1e-15) * 1e-4,
                backend="extended", dps=min(dps_t, dps_cap),
            )
            if accept(out):
                return out
        except (CancellationError, NonConvergence, OverflowError):
            pass

    if absz >= 25.0 and params.rho != 0.0:
        from . import asymptotics
        from .errors import WrightlabError

        try:
            need_ext = abs(ln_scale) > 600.0
            out = asymptotics.asymptotic_eval(
                params, z, M=4,
                backend="extended" if need_ext else backend,
                dps=dps or 40,
            )
            if accept(out):
                return out
        except (WrightlabError, OverflowError, ZeroDivisionError):
            pass

    if params.rho != 0.0:
        ladder = [None, 40, 80, 160, 320]
        for step in ladder:
            if step is not None and step > dps_cap:
                break
            try:
                out = phi_hankel(
                    params, z,
                    backend="double" if step is None else "extended",
                    dps=step,
                    rel_tol=max(rel_tol * 0.1, 1e-13),
                )
            except (QuadratureDivergence, OverflowError):
                continue
            if accept(out):
                return out
            # magnitude left double range entirely: jump to extended
            if step is None and ctxless_underflow(out):
                continue
            if out.rel_err() < 10.0 * rel_tol:
                break

    if not candidates:
        raise EvaluationFailure(
            f"all evaluation strategies failed for rho={params.rho}, "
            f"beta={params.beta}, z={z}"
        )
    return min(candidates, key=lambda o: o.rel_err())


def ctxless_underflow(out: EvalOutcome) -> bool:
    v = out.value
    if isinstance(v, complex):
        return v == 0
    return False


# ---------------------------------------------------------------------------
# Mainardi kernels

def mainardi_m(beta: float, z, **kwargs) -> EvalOutcome:
    """Mainardi kernel M(z; beta) = phi(-beta, 1 - beta; -z), 0<beta<1."""
    if not 0.0 < beta < 1.0:
        raise DomainError(f"need 0 < beta < 1, got {beta}")
    z = _check_finite(z)
    return phi_eval(WrightParams(-beta, 1.0 - beta), -z, **kwargs)


def mainardi_f(beta: float, z, **kwargs) -> EvalOutcome:
    """F(z; beta) = phi(-beta, 0; -z) = beta z M(z; beta)."""
    if not 0.0 < beta < 1.0:
        raise DomainError(f"need 0 < beta < 1, got {beta}")
    z = _check_finite(z)
    return phi_eval(WrightParams(-beta, 0.0), -z, **kwargs)
