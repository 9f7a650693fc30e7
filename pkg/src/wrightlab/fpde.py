"""Fractional diffusion-wave machinery.

Covers the discrete Caputo / Riemann-Liouville derivatives (L1-type
schemes on uniform grids), Erdelyi-Kober operators, the Cauchy and
signalling Green functions, convolution solutions, generalized Wright
series, the scale-invariant solution families, and a residual checker
that feeds every analytic solution back through the discrete operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import growth
from ._backend import resolve
from .core import WrightParams, _check_finite, mainardi_m, phi_eval
from .errors import (
    DivergentSeries,
    DomainError,
    GridTooCoarse,
    ParameterError,
    ParameterWindow,
    PoleError,
    QuadratureError,
    StencilError,
)
from .gammakit import complex_gamma
from .quadrature import adaptive_panel, integrate_to_infinity, jacobi_weighted

_SQRT = math.sqrt


# ---------------------------------------------------------------------------
# problem descriptors

@dataclass(frozen=True)
class DiffusionSpec:
    """Fractional diffusion-wave problem: order alpha in (0, 2] and
    diffusivity D > 0; the similarity order beta = alpha/2."""

    alpha: float
    D: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise DomainError(f"need 0 < alpha <= 2, got {self.alpha}")
        if not self.D > 0.0:
            raise DomainError(f"need D > 0, got {self.D}")

    @property
    def beta(self) -> float:
        return 0.5 * self.alpha


@dataclass(frozen=True)
class TSFSpec:
    """Time- and space-fractional problem d^alpha_t u = D d^beta_x u,
    both derivatives of Riemann-Liouville type."""

    alpha: float
    beta: float
    D: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.D > 0):
            raise DomainError("alpha, beta, D must be positive")


@dataclass(frozen=True)
class ScalingGroup:
    """Exponents of the invariance group x -> l^a x, t -> l^b t,
    u -> l^c u, with gamma the similarity exponent of t^gamma v(y)."""

    a: float
    b: float
    c: float
    gamma: float


@dataclass(frozen=True)
class GenWrightParams:
    """Gamma-factor lists for generalized Wright series: products of
    Gamma(a + A k) upstairs and 1/Gamma(b + B k) downstairs; no
    implicit k! (put an explicit (1, 1) pair downstairs for that)."""

    upper: tuple = ()
    lower: tuple = ()

    def __post_init__(self):
        for w, off in list(self.upper) + list(self.lower):
            _check_finite(off)
            if not math.isfinite(w):
                raise DomainError("weights must be finite")

    def convergence_margin(self) -> float:
        return sum(w for w, _ in self.lower) - sum(w for w, _ in self.upper)


_EK_FLAVORS = ("integral", "differential", "caputo_type")
_EK_SIDES = ("left", "right")


@dataclass(frozen=True)
class EKOperatorSpec:
    """Erdelyi-Kober operator descriptor.

    Five combinations exist: left/right integrals, left/right
    differential forms, and the Caputo-type left differential form
    (inner Euler product applied before the integral).
    """

    delta: float
    tau: float
    order: float
    side: str = "left"
    flavor: str = "integral"

    def __post_init__(self):
        if self.delta <= 0:
            raise DomainError("delta must be positive")
        if self.flavor not in _EK_FLAVORS:
            raise DomainError(f"unknown flavor {self.flavor!r}")
        if self.side not in _EK_SIDES:
            raise DomainError(f"unknown side {self.side!r}")
        if self.order < 0:
            raise DomainError("operator order must be >= 0")
        if self.flavor == "caputo_type" and self.side != "left":
            raise DomainError("the Caputo-type modification is left-sided")
        if self.flavor != "integral" and self.order > 2.0:
            raise DomainError("differential flavors support order <= 2")


# ---------------------------------------------------------------------------
# discrete fractional time derivatives (uniform grids)

def _check_grid(samples, t_index):
    samples = np.asarray(samples, dtype=float)
    if t_index < 2:
        raise GridTooCoarse("need t_index >= 2")
    if t_index >= len(samples):
        raise DomainError("t_index beyond the sample range")
    if t_index < 8:
        raise GridTooCoarse(
            f"only {t_index} history points before t_index; need >= 8"
        )
    return samples


def caputo_derivative(samples, dt: float, alpha: float, t_index: int) -> float:
    """L1-scheme Caputo derivative at t = t_index * dt.

    0 < alpha < 1 uses the classical L1 form on first differences
    (order 2-alpha); 1 < alpha < 2 the L1 form on second differences
    with the zero-initial-velocity convention; integer orders collapse
    to central differences.  Exact on constants.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    if not 0.0 < alpha < 2.0 + 1e-12:
        raise DomainError("supported order range is (0, 2]")
    u = _check_grid(samples, t_index)
    n = t_index
    if abs(alpha - 1.0) <= 1e-12:
        if n + 1 < len(u):
            return (u[n + 1] - u[n - 1]) / (2.0 * dt)
        return (u[n] - u[n - 1]) / dt
    if abs(alpha - 2.0) <= 1e-12:
        if n + 1 < len(u):
            return (u[n + 1] - 2.0 * u[n] + u[n - 1]) / dt**2
        return (u[n] - 2.0 * u[n - 1] + u[n - 2]) / dt**2
    if alpha < 1.0:
        j = np.arange(n)
        b = (j + 1.0) ** (1.0 - alpha) - j ** (1.0 - alpha)
        diffs = u[1 : n + 1] - u[:n]
        return float(
            dt ** (-alpha) / math.gamma(2.0 - alpha) * np.dot(b[::-1], diffs)
        )
    # 1 < alpha < 2; du(0)/dt is taken as zero (continuity in alpha)
    du = np.empty(n + 1)
    du[0] = 0.0
    du[1:] = (u[1 : n + 1] - u[:n]) / dt
    k = np.arange(n)
    w = (n - k) ** (2.0 - alpha) - (n - k - 1.0) ** (2.0 - alpha)
    return float(
        dt ** (1.0 - alpha)
        / math.gamma(3.0 - alpha)
        * np.dot(w, du[1:] - du[:-1])
    )


def _fractional_integral_linear(u, dt: float, mu: float):
    """I^mu u on the whole grid by product integration, exact for
    piecewise-linear u."""
    n = len(u) - 1
    j = np.arange(n + 1)
    out = np.zeros(n + 1)
    # weights via second differences of j^(mu+1), assembled per target
    powers = j ** (mu + 1.0)
    for m in range(1, n + 1):
        idx = np.arange(m + 1)
        a = np.empty(m + 1)
        if m >= 2:
            a[1:m] = (
                powers[m - idx[1:m] + 1]
                - 2.0 * powers[m - idx[1:m]]
                + powers[m - idx[1:m] - 1]
            )
        a[0] = powers[m - 1] - powers[m] + (mu + 1.0) * m**mu
        a[m] = 1.0
        out[m] = np.dot(a, u[: m + 1])
    out *= dt**mu / math.gamma(mu + 2.0)
    return out


def rl_derivative(samples, dt: float, alpha: float, t_index: int) -> float:
    """Riemann-Liouville derivative: differentiate the fractional
    integral I^(n-alpha) u numerically after product integration.

    Constants map to u(0) t^(-alpha)/Gamma(1-alpha), not zero.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    if not 0.0 < alpha <= 2.0 + 1e-12:
        raise DomainError("supported order range is (0, 2]")
    u = _check_grid(samples, t_index)
    n = t_index
    if abs(alpha - 1.0) <= 1e-12:
        if n + 1 < len(u):
            return (u[n + 1] - u[n - 1]) / (2.0 * dt)
        return (u[n] - u[n - 1]) / dt
    if abs(alpha - 2.0) <= 1e-12:
        if n + 1 < len(u):
            return (u[n + 1] - 2.0 * u[n] + u[n - 1]) / dt**2
        return (u[n] - 2.0 * u[n - 1] + u[n - 2]) / dt**2
    if alpha < 1.0:
        v = _fractional_integral_linear(u, dt, 1.0 - alpha)
        if n + 1 < len(v):
            return (v[n + 1] - v[n - 1]) / (2.0 * dt)
        return (1.5 * v[n] - 2.0 * v[n - 1] + 0.5 * v[n - 2]) / dt
    v = _fractional_integral_linear(u, dt, 2.0 - alpha)
    if n + 1 < len(v):
        return (v[n + 1] - 2.0 * v[n] + v[n - 1]) / dt**2
    return (v[n] - 2.0 * v[n - 1] + v[n - 2]) / dt**2


# ---------------------------------------------------------------------------
# Erdelyi-Kober operators

_STIRLING2 = {
    (0, 0): 1,
    (1, 1): 1,
    (2, 1): 1, (2, 2): 1,
    (3, 1): 1, (3, 2): 3, (3, 3): 1,
    (4, 1): 1, (4, 2): 7, (4, 3): 6, (4, 4): 1,
}


def _euler_poly_coeffs(cs, scale):
    """Coefficients q_m of prod_j (c_j + scale * E) as a polynomial in
    the Euler operator E = y d/dy."""
    poly = [1.0]
    for c in cs:
        new = [0.0] * (len(poly) + 1)
        for m, q in enumerate(poly):
            new[m] += q * c
            new[m + 1] += q * scale
        poly = new
    return poly


def _apply_euler_poly(poly, g, y, rel_step=1e-3):
    """Evaluate sum_m q_m E^m g at y via a 5-point stencil.

    E^m is expanded through y^k g^(k) with Stirling numbers; supports
    derivative order up to 2 (operator order <= 2)."""
    deg = len(poly) - 1
    if deg > 2:
        raise StencilError("Euler-operator product beyond order 2")
    if deg == 0:
        return poly[0] * g(y)
    h = max(abs(y), 1e-6) * rel_step
    if y - 2 * h <= 0:
        raise StencilError(f"stencil leaves (0, inf) at y = {y}")
    gm2, gm1, g0, gp1, gp2 = (
        g(y - 2 * h), g(y - h), g(y), g(y + h), g(y + 2 * h)
    )
    d1 = (gm2 - 8.0 * gm1 + 8.0 * gp1 - gp2) / (12.0 * h)
    out = poly[0] * g0
    # c_k = sum_m q_m S(m, k); E^m = sum_k S(m,k) y^k d^k
    c1 = sum(poly[m] * _STIRLING2.get((m, 1), 0) for m in range(1, deg + 1))
    out += c1 * y * d1
    if deg >= 2:
        d2 = (-gm2 + 16.0 * gm1 - 30.0 * g0 + 16.0 * gp1 - gp2) / (12.0 * h**2)
        c2 = sum(poly[m] * _STIRLING2.get((m, 2), 0) for m in range(2, deg + 1))
        out += c2 * y * y * d2
    return out


def _ek_integral_left(delta, tau, order, g, y, tol):
    """(K g)(y) = 1/Gamma(a) int_1^inf (u-1)^(a-1) u^-(tau+a) g(y u^(1/delta)) du,
    computed on w = 1/u in [0, 1] with Gauss-Jacobi absorbing the
    endpoint weights."""
    if order == 0.0:
        return g(y)
    a = order
    if tau > 1e-9:
        h = lambda w: g(y * w ** (-1.0 / delta))
        val, err = jacobi_weighted(h, a - 1.0, tau - 1.0, tol)
    else:
        h = lambda w: w ** (tau - 1.0) * g(y * w ** (-1.0 / delta))
        val, err = jacobi_weighted(h, a - 1.0, 0.0, tol)
    if not math.isfinite(val):
        raise QuadratureError("left EK integral did not converge")
    return val / math.gamma(a)


def _ek_integral_right(delta, tau, order, g, y, tol):
    """(I g)(y) = 1/Gamma(b) int_0^1 (1-u)^(b-1) u^tau g(y u^(1/delta)) du."""
    if order == 0.0:
        return g(y)
    b = order
    if tau <= -1.0:
        raise QuadratureError(f"right EK integral needs tau > -1, got {tau}")
    h = lambda u: g(y * u ** (1.0 / delta))
    val, err = jacobi_weighted(h, b - 1.0, tau, tol)
    if not math.isfinite(val):
        raise QuadratureError("right EK integral did not converge")
    return val / math.gamma(b)


def ek_apply(spec: EKOperatorSpec, g: Callable[[float], float], y: float,
             tol: float = 1e-10) -> float:
    """Apply one Erdelyi-Kober operator to g at y > 0.

    Integral flavors use Gauss-Jacobi rules that absorb the endpoint
    weights; differential flavors expand the Euler-operator product
    symbolically in y d/dy before discretising with 5-point central
    stencils of relative step 1e-3 (order 0 is the exact identity).
    """
    if y <= 0:
        raise DomainError("EK operators act on (0, inf)")
    d, tau, order = spec.delta, spec.tau, spec.order
    if spec.flavor == "integral":
        if spec.side == "left":
            return _ek_integral_left(d, tau, order, g, y, tol)
        return _ek_integral_right(d, tau, order, g, y, tol)
    n = max(1, math.ceil(order - 1e-12))
    frac = n - order  # order of the auxiliary integral
    if spec.flavor == "caputo_type":
        poly = _euler_poly_coeffs([tau + j for j in range(n)], -1.0 / d)
        inner = lambda w: _apply_euler_poly(poly, g, w)
        return _ek_integral_left(d, tau, frac, inner, y, tol)
    if spec.side == "left":
        poly = _euler_poly_coeffs([tau + j for j in range(n)], -1.0 / d)
        outer = lambda w: _ek_integral_left(d, tau + order, frac, g, w, tol)
        return _apply_euler_poly(poly, outer, y)
    poly = _euler_poly_coeffs([tau + j for j in range(1, n + 1)], 1.0 / d)
    outer = lambda w: _ek_integral_right(d, tau + order, frac, g, w, tol)
    return _apply_euler_poly(poly, outer, y)


# ---------------------------------------------------------------------------
# Green functions

def _as_float(outcome) -> float:
    import mpmath

    v = outcome.value
    if isinstance(v, (mpmath.mpc, mpmath.mpf)):
        try:
            return float(mpmath.re(v))
        except OverflowError:
            return math.inf
    return complex(v).real


class GreenCauchy:
    """Fundamental solution of the Cauchy problem on the line.

    u(x, t) = t^(-beta)/(2 sqrt(D)) M(|x| t^(-beta) / sqrt(D); beta),
    including the removable x = 0 form.  Exposes exact x-derivatives
    through the Wright shift identity.
    """

    case = "green_cauchy"

    def __init__(self, spec: DiffusionSpec):
        self.spec = spec
        b = spec.beta
        self.scaling = ScalingGroup(a=1.0, b=2.0 / spec.alpha, c=-1.0, gamma=-b)

    def _m(self, which: int, w: float) -> float:
        b = self.spec.beta
        # derivatives of M(w) = phi(-b, 1-b; -w): each d/dw shifts the
        # second parameter down by b and flips a sign
        params = WrightParams(-b, 1.0 - b * (1 + which))
        out = phi_eval(params, -w, rel_tol=1e-11)
        return ((-1.0) ** which) * _as_float(out)

    def __call__(self, x: float, t: float) -> float:
        if t <= 0:
            raise DomainError("t must be positive")
        sd = _SQRT(self.spec.D)
        w = abs(x) * t ** (-self.spec.beta) / sd
        return t ** (-self.spec.beta) / (2.0 * sd) * self._m(0, w)

    u = __call__

    def u_xx(self, x: float, t: float) -> float:
        sd = _SQRT(self.spec.D)
        b = self.spec.beta
        w = abs(x) * t ** (-b) / sd
        return t ** (-3.0 * b) / (2.0 * sd**3) * self._m(2, w)


class GreenSignalling:
    """Fundamental solution of the signalling problem on x > 0:
    u(x, t) = beta r / (sqrt(D) t) M(r / sqrt(D); beta), r = x t^(-beta)."""

    case = "green_signalling"

    def __init__(self, spec: DiffusionSpec):
        self.spec = spec
        self.scaling = ScalingGroup(a=1.0, b=2.0 / spec.alpha, c=0.0, gamma=0.0)

    def __call__(self, x: float, t: float) -> float:
        if x <= 0 or t <= 0:
            raise DomainError("signalling Green function needs x, t > 0")
        b = self.spec.beta
        sd = _SQRT(self.spec.D)
        r = x * t ** (-b)
        return b * r / (sd * t) * _as_float(mainardi_m(b, r / sd))

    u = __call__


def green_cauchy(spec: DiffusionSpec, x: float, t: float) -> float:
    return GreenCauchy(spec)(x, t)


def green_signalling(spec: DiffusionSpec, x: float, t: float) -> float:
    return GreenSignalling(spec)(x, t)


def _mainardi_decay_cut(beta: float, tol: float) -> float:
    """w beyond which M(w; beta) < tol, from the stretched-exponential law."""
    g = growth.order_type(-beta)
    return (max(math.log(1.0 / tol), 1.0) / g.sigma) ** (1.0 / g.p)


def solve_cauchy(spec: DiffusionSpec, g, x: float, t: float,
                 tol: float = 1e-9, point_mass: bool = False) -> float:
    """Convolution solution of the Cauchy problem.

    ``point_mass=True`` treats g as a unit Dirac mass at the origin and
    returns the Green function itself.
    """
    if point_mass:
        return green_cauchy(spec, x, t)
    if t <= 0:
        raise DomainError("t must be positive")
    G = GreenCauchy(spec)
    L = _SQRT(spec.D) * t**spec.beta * _mainardi_decay_cut(spec.beta, tol * 1e-3)

    def f(eta):
        return G(eta, t) * g(x - eta)

    left, e1 = adaptive_panel(f, -L, 0.0, tol)
    right, e2 = adaptive_panel(f, 0.0, L, tol)
    if e1 + e2 > max(100 * tol, 1e-6):
        raise QuadratureError("Cauchy convolution did not reach tolerance")
    return left + right


def solve_signalling(spec: DiffusionSpec, h, x: float, t: float,
                     tol: float = 1e-9, impulse: bool = False) -> float:
    """Boundary-convolution solution of the signalling problem.

    ``impulse=True`` treats h as a Dirac impulse at t = 0.
    """
    if impulse:
        return green_signalling(spec, x, t)
    if x <= 0 or t <= 0:
        raise DomainError("signalling solution needs x, t > 0")
    G = GreenSignalling(spec)

    def f(tau):
        s = t - tau
        if s <= 0:
            return 0.0
        val = G(x, s)
        return val * h(tau)

    value, err = adaptive_panel(f, 0.0, t, tol)
    if err > max(100 * tol, 1e-6):
        raise QuadratureError("signalling convolution did not reach tolerance")
    return value


# ---------------------------------------------------------------------------
# generalized Wright series

def gen_wright(params: GenWrightParams, z, tol: float = 1e-14, *,
               backend=None, dps=None, max_terms: int = 100_000):
    """sum_k z^k prod Gamma(a_i + A_i k) / prod Gamma(b_j + B_j k).

    Negative weights downstairs are handled exactly through the entire
    reciprocal gamma.  DivergentSeries outside the convergence domain
    (weight margin < 0, or = 0 with |z| at/beyond the radius).
    """
    z = _check_finite(z)
    margin = params.convergence_margin()
    radius = math.inf
    if margin < -1e-13:
        raise DivergentSeries(
            f"gamma-weight margin {margin:.3g} < 0: series diverges"
        )
    if abs(margin) <= 1e-13:
        radius = 1.0
        for w, _ in params.lower:
            if w != 0.0:
                radius *= abs(w) ** w
        for w, _ in params.upper:
            if w != 0.0:
                radius /= abs(w) ** w
        if abs(z) >= radius:
            raise DivergentSeries(
                f"|z| = {abs(z):.3g} outside the convergence radius {radius:.3g}"
            )
    ctx = resolve(backend, dps)
    with ctx.workprec():
        zc = ctx.to(z)
        acc = ctx.to(0)
        kmin = 10 + int(2.0 * abs(z) ** (1.0 / max(margin, 0.05)))
        kmin = min(kmin, max_terms // 4)
        zpow = ctx.to(1)
        small = 0
        upper = [(w, ctx.to(off)) for w, off in params.upper]
        lower = [(w, ctx.to(off)) for w, off in params.lower]
        wk = None
        for k in range(max_terms):
            term = zpow
            try:
                for w, off in upper:
                    term = term * ctx.gamma(off + ctx.to(w).real * k)
            except PoleError as exc:
                raise ParameterError(
                    f"upper gamma factor hits a pole at k={k}"
                ) from exc
            for w, off in lower:
                term = term * ctx.rgamma(off + ctx.to(w).real * k)
            acc = acc + term
            zpow = zpow * zc
            if ctx.mag(term) <= tol * (ctx.mag(acc) + 1e-300):
                small += 1
                if small >= 3 and k >= kmin:
                    wk = k
                    break
            else:
                small = 0
        if wk is None:
            raise DivergentSeries(
                f"generalized Wright series did not settle in {max_terms} terms"
            )
    from .core import EvalOutcome

    err = 3.0 * tol * (ctx.mag(acc) + 1e-300)
    return EvalOutcome(acc, err, "taylor", wk + 1)


def psi_pfq(upper, lower, z, **kwargs):
    """pPsiq: gen_wright with the 1/k! pair added downstairs."""
    params = GenWrightParams(
        upper=tuple(upper), lower=tuple(lower) + ((1.0, 1.0),)
    )
    return gen_wright(params, z, **kwargs)

# ---------------------------------------------------------------------------
# scale-invariant solutions

_CASES = ("solA", "solB", "solC", "solD", "sol1", "sol3", "soln", "tsf")


class SimilaritySolution:
    """Closed-form scale-invariant solution u(x, t) = t^gamma v(x t^-kappa).

    Exposes the profile v(y), the scaling group, and (where the profile
    is built purely from ordinary Wright functions) exact second
    x-derivatives for residual checks.
    """

    def __init__(self, case, spec, gamma, constants, scaling, v_fn,
                 v_dd_fn=None, kappa=None):
        self.case = case
        self.spec = spec
        self.gamma = gamma
        self.constants = tuple(constants)
        self.scaling = scaling
        self._v = v_fn
        self._v_dd = v_dd_fn
        self.kappa = kappa if kappa is not None else spec.alpha / 2.0

    def v(self, y: float) -> float:
        return self._v(y)

    def u(self, x: float, t: float) -> float:
        if t <= 0:
            raise DomainError("t must be positive")
        y = x * t ** (-self.kappa)
        return t**self.gamma * self._v(y)

    __call__ = u

    def u_xx(self, x: float, t: float) -> float:
        y = x * t ** (-self.kappa)
        if self._v_dd is not None:
            return t ** (self.gamma - 2.0 * self.kappa) * self._v_dd(y)
        h = max(abs(x), 1e-3) * 1e-4
        return (
            self.u(x + h, t) - 2.0 * self.u(x, t) + self.u(x - h, t)
        ) / h**2

    def has_exact_uxx(self) -> bool:
        return self._v_dd is not None


def _phi_f(rho, beta, arg) -> float:
    return _as_float(phi_eval(WrightParams(rho, beta), arg, rel_tol=1e-11))


def scale_invariant(case: str, spec, gamma: float = 0.0,
                    constants=(1.0,)) -> SimilaritySolution:
    """Construct one scale-invariant solution family member.

    Cases: solA/solB (Caputo diffusion), solC/solD (Caputo wave),
    sol1 (Riemann-Liouville, 1 <= alpha < 2), sol3 (RL, alpha > 2
    non-integer), soln (integer order n > 2), tsf (time- and
    space-fractional).  Raises ParameterWindow outside each family's
    stated validity window.
    """
    if case not in _CASES:
        raise DomainError(f"unknown case {case!r}")
    constants = tuple(float(c) for c in constants)

    if case == "tsf":
        if not isinstance(spec, TSFSpec):
            raise DomainError("tsf case needs a TSFSpec")
        return _build_tsf(spec, gamma, constants)
    if not isinstance(spec, DiffusionSpec):
        raise DomainError(f"{case} needs a DiffusionSpec")
    alpha, D = spec.alpha, spec.D
    sd = _SQRT(D)
    group = ScalingGroup(a=1.0, b=2.0 / alpha, c=2.0 * gamma / alpha,
                         gamma=gamma)

    def pad(k):
        if len(constants) < k:
            raise DomainError(f"{case} needs {k} constants")
        return constants

    if case == "solA":
        if not (0.0 < alpha <= 1.0):
            raise ParameterWindow("solA needs 0 < alpha <= 1")
        if not (gamma > -1.0 and gamma != 0.0):
            raise ParameterWindow("solA needs gamma > -1, gamma != 0")
        (c1,) = pad(1)[:1]
        v = lambda y: c1 * _phi_f(-alpha / 2, 1.0 + gamma, -y / sd)
        v_dd = lambda y: c1 / D * _phi_f(-alpha / 2, 1.0 + gamma - alpha, -y / sd)
        return SimilaritySolution(case, spec, gamma, constants, group, v, v_dd)
    if case == "solB":
        if not (0.0 < alpha <= 1.0):
            raise ParameterWindow("solB needs 0 < alpha <= 1")
        if gamma != 0.0:
            raise ParameterWindow("solB is the gamma = 0 branch")
        c1, c2 = (pad(2)[0], pad(2)[1])
        v = lambda y: c1 * _phi_f(-alpha / 2, 1.0, -y / sd) + c2
        v_dd = lambda y: c1 / D * _phi_f(-alpha / 2, 1.0 - alpha, -y / sd)
        return SimilaritySolution(case, spec, gamma, constants, group, v, v_dd)
    if case in ("solC", "solD"):
        if not (1.0 < alpha < 2.0):
            raise ParameterWindow(f"{case} needs 1 < alpha < 2")
        if case == "solC":
            if not (1.0 - alpha < gamma < 1.0) or gamma in (0.0,) or abs(
                gamma - (1.0 - alpha / 2.0)
            ) < 1e-12:
                raise ParameterWindow(
                    "solC needs 1-alpha < gamma < 1, gamma not in {0, 1-alpha/2}"
                )
            c1, c2 = pad(2)[0], pad(2)[1]
            c3 = 0.0
        else:
            if gamma != 0.0:
                raise ParameterWindow("solD is the gamma = 0 branch")
            c1, c2 = pad(2)[0], pad(2)[1]
            c3 = constants[2] if len(constants) > 2 else 0.0
        expo = 2.0 + 2.0 * (gamma - 1.0) / alpha
        gw = GenWrightParams(
            lower=((-alpha, 2.0 - alpha), (2.0, 3.0 + 2.0 * (gamma - 1.0) / alpha))
        )

        def v(y):
            out = c1 * _phi_f(-alpha / 2, 1.0 + gamma, -y / sd)
            if c2 != 0.0:
                second = D ** ((gamma - 1.0) / alpha) / 2.0 * _phi_f(
                    -alpha / 2, 1.0 + gamma, y / sd
                )
                tail = 0.0
                if y != 0.0:
                    tail = abs(y) ** expo / D * _as_float(
                        gen_wright(gw, y * y / D)
                    )
                out += c2 * (second - tail)
            return out + c3

        return SimilaritySolution(case, spec, gamma, constants, group, v)
    if case == "sol1":
        if not (1.0 <= alpha < 2.0):
            raise ParameterWindow("sol1 needs 1 <= alpha < 2")
        if gamma != 0.0:
            raise ParameterWindow("sol1 has gamma = 0 (u = v(y))")
        c1, c2 = pad(2)[0], pad(2)[1]
        v = lambda y: (
            c1 * _phi_f(-alpha / 2, 1.0, -y / sd)
            + c2 * _phi_f(-alpha / 2, 1.0, y / sd)
        )
        v_dd = lambda y: (
            c1 / D * _phi_f(-alpha / 2, 1.0 - alpha, -y / sd)
            + c2 / D * _phi_f(-alpha / 2, 1.0 - alpha, y / sd)
        )
        group = ScalingGroup(a=1.0, b=2.0 / alpha, c=0.0, gamma=0.0)
        return SimilaritySolution(case, spec, 0.0, constants, group, v, v_dd)
    if case == "sol3":
        if not (alpha > 2.0 and abs(alpha - round(alpha)) > 1e-9):
            raise ParameterWindow("sol3 needs non-integer alpha > 2")
        cs = pad(int(math.floor(alpha)) + 1)

        def v(y):
            if y <= 0:
                raise DomainError("sol3 profile lives on y > 0")
            out = 0.0
            for j in range(int(math.floor(alpha)) + 1):
                if cs[j] == 0.0:
                    continue
                term = psi_pfq(
                    [(1.0, 1.0), (2.0, 2.0 - 2.0 * (1 + j) / alpha)],
                    [(alpha, alpha - j)],
                    D / y**2,
                )
                out += cs[j] * y ** (-2.0 + 2.0 * (1 + j) / alpha) * _as_float(term)
            return out

        group = ScalingGroup(a=1.0, b=2.0 / alpha, c=0.0, gamma=0.0)
        return SimilaritySolution("sol3", spec, 0.0, constants, group, v)
    # soln: integer order n > 2
    n = round(alpha)
    if abs(alpha - n) > 1e-12 or n <= 2:
        raise ParameterWindow("soln needs integer alpha = n > 2")
    cs = pad(n)

    def v(y):
        if y <= 0:
            raise DomainError("soln profile lives on y > 0")
        out = cs[n - 1]
        for j in range(n - 1):
            if cs[j] == 0.0:
                continue
            term = psi_pfq(
                [(1.0, 1.0), (2.0, 2.0 - 2.0 * (1 + j) / n)],
                [(float(n), float(n - j))],
                D / y**2,
            )
            out += cs[j] * y ** (-2.0 + 2.0 * (1 + j) / n) * _as_float(term)
        return out

    group = ScalingGroup(a=1.0, b=2.0 / n, c=0.0, gamma=0.0)
    return SimilaritySolution("soln", spec, 0.0, constants, group, v)


def _build_tsf(spec: TSFSpec, gamma: float, constants) -> SimilaritySolution:
    alpha, beta, D = spec.alpha, spec.beta, spec.D
    if not (beta / 2.0 <= alpha < beta <= 2.0):
        raise ParameterWindow("tsf needs beta/2 <= alpha < beta <= 2")
    if gamma < 0.0:
        raise ParameterWindow("tsf needs gamma >= 0")
    n = math.ceil(beta - 1e-12)
    if len(constants) < n:
        raise DomainError(f"tsf needs {n} constants")

    def v(y):
        if y <= 0:
            raise DomainError("tsf profile lives on y > 0")
        out = 0.0
        for j in range(1, n + 1):
            if constants[j - 1] == 0.0:
                continue
            gw = GenWrightParams(
                lower=(
                    (-alpha, 1.0 + gamma - alpha + alpha * j / beta),
                    (beta, 1.0 + beta - j),
                )
            )
            out += constants[j - 1] * y ** (beta - j) * _as_float(
                gen_wright(gw, y**beta / D)
            )
        return out

    group = ScalingGroup(a=1.0, b=beta / alpha, c=gamma * beta / alpha,
                         gamma=gamma)
    sol = SimilaritySolution("tsf", spec, gamma, constants, group, v,
                             kappa=alpha / beta)
    return sol


# ---------------------------------------------------------------------------
# residual verification

_RL_CASES = ("sol1", "sol3", "soln", "tsf")


@dataclass
class ResidualGrid:
    """Probe layout for residual_check: spatial points, probe times,
    uniform time step."""

    x_values: tuple
    t_values: tuple
    dt: float

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError("dt must be positive")
        if any(t <= 0 for t in self.t_values):
            raise DomainError("probe times must be positive")


@dataclass
class ResidualReport:
    rows: list                  # (x, t, lhs, rhs, scaled_residual)
    max_scaled_residual: float
    derivative: str             # "caputo" or "riemann_liouville"


def residual_check(u_obj, spec, grid: ResidualGrid,
                   floor: float = 1e-8) -> ResidualReport:
    """Feed an analytic solution through the discrete operators.

    Time derivative: Caputo (L1) or Riemann-Liouville per the solution
    family; space side D u_xx, exact when the solution provides it.
    The residual at each probe is |LHS - RHS| / max(|LHS|, |RHS|, floor).
    """
    case = getattr(u_obj, "case", "")
    kind = "riemann_liouville" if case in _RL_CASES else "caputo"
    alpha = spec.alpha
    rows = []
    worst = 0.0
    for x in grid.x_values:
        t_max = max(grid.t_values)
        n_max = int(round(t_max / grid.dt))
        ts = np.arange(n_max + 2) * grid.dt
        samples = np.array([
            u_obj.u(x, t) if t > 0 else _u_at_zero(u_obj, x)
            for t in ts
        ])
        for t in grid.t_values:
            n = int(round(t / grid.dt))
            if abs(n * grid.dt - t) > 1e-9 * grid.dt:
                raise DomainError("probe times must sit on the grid")
            if kind == "caputo":
                lhs = caputo_derivative(samples, grid.dt, alpha, n)
            else:
                lhs = rl_derivative(samples, grid.dt, alpha, n)
            rhs = spec.D * u_obj.u_xx(x, n * grid.dt)
            scale = max(abs(lhs), abs(rhs), floor)
            res = abs(lhs - rhs) / scale
            worst = max(worst, res)
            rows.append((x, n * grid.dt, lhs, rhs, res))
    return ResidualReport(rows=rows, max_scaled_residual=worst,
                          derivative=kind)


def _u_at_zero(u_obj, x: float) -> float:
    """Continuous limit of u(x, t) as t -> 0+ (profiles decay fast in y)."""
    try:
        return u_obj.u(x, 1e-12)
    except (OverflowError, DomainError):
        return 0.0


def tsf_residual_check(sol: SimilaritySolution, grid: ResidualGrid,
                       nx: int = 257, floor: float = 1e-6) -> ResidualReport:
    """Residual of the time- and space-fractional equation: the
    Riemann-Liouville x-derivative of order beta is evaluated with the
    same product-integration kernel along x from 0."""
    spec = sol.spec
    if not isinstance(spec, TSFSpec):
        raise DomainError("tsf_residual_check needs a tsf solution")
    rows = []
    worst = 0.0
    for t in grid.t_values:
        n = int(round(t / grid.dt))
        x_hi = max(grid.x_values) * 1.25
        dx = x_hi / (nx - 1)
        xs = np.arange(nx) * dx
        u_line = np.array([sol.u(x, t) if x > 0 else 0.0 for x in xs])
        t_samples = {}
        for x in grid.x_values:
            i = int(round(x / dx))
            if i < 8 or i >= nx - 1:
                continue
            ts = np.arange(n + 2) * grid.dt
            samples = np.array([
                sol.u(x, tt) if tt > 0 else 0.0 for tt in ts
            ])
            lhs = rl_derivative(samples, grid.dt, spec.alpha, n)
            rhs = spec.D * rl_derivative(u_line, dx, spec.beta, i)
            scale = max(abs(lhs), abs(rhs), floor)
            res = abs(lhs - rhs) / scale
            worst = max(worst, res)
            rows.append((xs[i], t, lhs, rhs, res))
    return ResidualReport(rows=rows, max_scaled_residual=worst,
                          derivative="riemann_liouville")
