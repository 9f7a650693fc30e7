"""Forward Laplace transforms and the catalog of transform-pair checks.

Every pair is verified as an equality between two independently
computed sides: the left by real quadrature of the time-domain function
(built from the Wright evaluators), the right from the stated image
(Mittag-Leffler, elementary, or a second Wright evaluation).  Forward
direction only; the inverse route would just re-run the Hankel contour
that wright-core already covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import WrightParams, mainardi_f, mainardi_m, phi_eval
from .errors import DomainError
from .gammakit import complex_gamma
from .mittag_leffler import MLParams, ml_series
from .quadrature import adaptive_panel, integrate_to_infinity

PAIR_IDS = (
    "RHO_POS",
    "ML_IMAGE",
    "MAINARDI_ML",
    "F_EXP",
    "M_SEXP",
    "STANKOVIC_GEN",
    "STANKOVIC_HALF",
    "STANKOVIC_TRIG",
)

_DEFAULT_S_GRID = (0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class PairSpec:
    """One catalog entry: pair id, parameters, Laplace abscissas."""

    id: str
    params: dict = field(default_factory=dict)
    s_grid: tuple = _DEFAULT_S_GRID

    def __post_init__(self):
        if self.id not in PAIR_IDS:
            raise DomainError(f"unknown pair id {self.id!r}")
        if any(s <= 0 for s in self.s_grid):
            raise DomainError("Laplace abscissas must be positive")
        _VALIDATORS[self.id](self.params)


def _need(params, *keys):
    for key in keys:
        if key not in params:
            raise DomainError(f"pair needs parameter {key!r}")


_VALIDATORS = {
    "RHO_POS": lambda p: (_need(p, "rho", "beta"),
                          _require(p["rho"] > 0, "rho > 0")),
    "ML_IMAGE": lambda p: (_need(p, "rho", "beta"),
                           _require(-1 < p["rho"] < 0, "-1 < rho < 0")),
    "MAINARDI_ML": lambda p: (_need(p, "beta"),
                              _require(0 < p["beta"] < 1, "0 < beta < 1")),
    "F_EXP": lambda p: (_need(p, "beta", "lam"),
                        _require(0 < p["beta"] < 1 and p["lam"] > 0,
                                 "0 < beta < 1, lam > 0")),
    "M_SEXP": lambda p: (_need(p, "beta", "lam"),
                         _require(0 < p["beta"] < 1 and p["lam"] > 0,
                                  "0 < beta < 1, lam > 0")),
    "STANKOVIC_GEN": lambda p: (_need(p, "rho", "beta", "lam"),
                                _require(-1 < p["rho"] < 0 and p["lam"] > 0,
                                         "-1 < rho < 0, lam > 0")),
    "STANKOVIC_HALF": lambda p: (_need(p, "rho", "beta"),
                                 _require(-1 < p["rho"] < 0, "-1 < rho < 0")),
    "STANKOVIC_TRIG": lambda p: (_need(p, "rho", "beta"),
                                 _require(-1 < p["rho"] < 0 and p["beta"] < 1,
                                          "-1 < rho < 0, beta < 1")),
}


def _require(cond, what):
    if not cond:
        raise DomainError(f"pair parameters violate {what}")


def laplace_forward(f, s: float, tol: float = 1e-10, *,
                    singular_exponent: float = 1.0, first_len=None):
    """int_0^inf e^(-s t) f(t) dt by adaptive panels.

    The range splits at t = 1/s, with geometrically growing panels
    beyond until contributions fall below tol.  ``singular_exponent``
    c declares f(t) ~ t^(c-1) near zero; the head panel then runs on
    the substituted variable t = u^(1/c), which removes the endpoint
    singularity exactly.

    Returns (value, err_estimate).
    """
    if s <= 0:
        raise DomainError("Laplace abscissa must be positive")
    if tol <= 0:
        raise DomainError("tol must be positive")
    c = singular_exponent
    t1 = 1.0 / s

    if abs(c - 1.0) <= 1e-12:
        head, e1 = adaptive_panel(lambda t: math.exp(-s * t) * f(t), 0.0, t1, tol)
    else:
        if c <= 0:
            raise DomainError("singular exponent must be positive")

        def head_sub(u):
            t = u ** (1.0 / c)
            return math.exp(-s * t) * f(t) * t ** (1.0 - c) / c
            # f(t) t^(1-c)/c stays bounded when f ~ t^(c-1)

        head, e1 = adaptive_panel(head_sub, 0.0, t1**c, tol)
    tail, e2 = integrate_to_infinity(
        lambda t: math.exp(-s * t) * f(t), t1, tol,
        first_len=first_len or t1,
    )
    return head + tail, e1 + e2


def _as_real(outcome) -> float:
    import mpmath

    v = outcome.value
    if isinstance(v, (mpmath.mpc, mpmath.mpf)):
        return float(mpmath.re(v))
    return complex(v).real


def _phi_real(rho, beta, z) -> float:
    return _as_real(phi_eval(WrightParams(rho, beta), z, rel_tol=1e-11))


@dataclass
class PairReport:
    spec: PairSpec
    rows: list          # (s, lhs, rhs, rel_dev)
    max_rel_dev: float


def _pair_sides(spec: PairSpec):
    """(time_domain_fn, image_fn, singular_exponent) for a pair."""
    p = spec.params
    pid = spec.id
    if pid == "RHO_POS":
        rho, beta = p["rho"], p["beta"]
        sign = p.get("sign", -1.0)

        def f(t):
            return _phi_real(rho, beta, sign * t)

        def image(s):
            return _as_real(
                ml_series(MLParams(rho, beta), sign / s, tol=1e-14)
            ) / s

        return f, image, 1.0
    if pid == "ML_IMAGE":
        rho, beta = p["rho"], p["beta"]

        def f(t):
            return _phi_real(rho, beta, -t)

        def image(s):
            return _as_real(ml_series(MLParams(-rho, beta - rho), -s, tol=1e-14))

        return f, image, 1.0
    if pid == "MAINARDI_ML":
        beta = p["beta"]

        def f(t):
            return _as_real(mainardi_m(beta, t))

        def image(s):
            return _as_real(ml_series(MLParams(beta, 1.0), -s, tol=1e-14))

        return f, image, 1.0
    if pid == "F_EXP":
        beta, lam = p["beta"], p["lam"]

        def f(t):
            return _as_real(mainardi_f(beta, lam * t ** (-beta))) / t

        def image(s):
            return math.exp(-lam * s**beta)

        return f, image, 1.0
    if pid == "M_SEXP":
        beta, lam = p["beta"], p["lam"]

        def f(t):
            return _as_real(mainardi_m(beta, lam * t ** (-beta))) * t ** (-beta)

        def image(s):
            return s ** (beta - 1.0) * math.exp(-lam * s**beta)

        # the Mainardi factor decays superexponentially as t -> 0,
        # killing the t^(-beta) power; no endpoint substitution needed
        return f, image, 1.0
    if pid == "STANKOVIC_GEN":
        rho, beta, lam = p["rho"], p["beta"], p["lam"]

        def f(t):
            return t ** (beta - 1.0) * _phi_real(rho, beta, -lam * t**rho)

        def image(s):
            return s ** (-beta) * math.exp(-lam * s ** (-rho))

        return f, image, 1.0
    if pid == "STANKOVIC_HALF":
        rho, beta = p["rho"], p["beta"]

        def f(t):
            return t ** (beta / 2.0 - 1.0) * _phi_real(rho, beta, -t ** (rho / 2.0))

        def image(s):
            return (
                math.sqrt(math.pi) / 2.0**beta
                * s ** (-beta / 2.0)
                * _phi_real(rho / 2.0, (beta + 1.0) / 2.0,
                            -(2.0 ** (-rho)) * s ** (-rho / 2.0))
            )

        return f, image, 1.0
    if pid == "STANKOVIC_TRIG":
        rho, beta = p["rho"], p["beta"]
        cr, sr = math.cos(rho * math.pi), math.sin(rho * math.pi)

        def f(t):
            w = t ** (-rho)
            return t ** (-beta) * math.exp(-w * cr) * math.sin(
                beta * math.pi - w * sr
            )

        def image(s):
            return math.pi * s ** (beta - 1.0) * _phi_real(rho, beta, -(s**rho))

        return f, image, 1.0 - beta
    raise DomainError(f"unknown pair id {pid!r}")


def verify_pair(spec: PairSpec, tol: float = 1e-9) -> PairReport:
    """Check one catalog pair over its s-grid.

    Both sides are computed independently; the report carries the
    maximum relative deviation.
    """
    f, image, c = _pair_sides(spec)
    rows = []
    worst = 0.0
    for s in spec.s_grid:
        lhs, _ = laplace_forward(f, s, tol=tol, singular_exponent=c)
        rhs = image(s)
        dev = abs(lhs - rhs) / max(abs(rhs), 1e-300)
        worst = max(worst, dev)
        rows.append((s, lhs, rhs, dev))
    return PairReport(spec=spec, rows=rows, max_rel_dev=worst)


def default_catalog():
    """Two parameter settings per pair, used by tests and the CLI suite."""
    entries = [
        PairSpec("RHO_POS", {"rho": 1.0, "beta": 1.0, "sign": -1.0}),
        PairSpec("RHO_POS", {"rho": 0.5, "beta": 1.5, "sign": 1.0}),
        PairSpec("ML_IMAGE", {"rho": -0.5, "beta": 1.0}),
        PairSpec("ML_IMAGE", {"rho": -0.25, "beta": 0.5}),
        PairSpec("MAINARDI_ML", {"beta": 0.5}),
        PairSpec("MAINARDI_ML", {"beta": 0.4}),
        PairSpec("F_EXP", {"beta": 0.5, "lam": 1.0}),
        PairSpec("F_EXP", {"beta": 0.75, "lam": 2.0}),
        PairSpec("M_SEXP", {"beta": 0.5, "lam": 1.0}),
        PairSpec("M_SEXP", {"beta": 0.4, "lam": 1.5}),
        PairSpec("STANKOVIC_GEN", {"rho": -0.5, "beta": 0.8, "lam": 1.0}),
        PairSpec("STANKOVIC_GEN", {"rho": -0.3, "beta": 1.2, "lam": 0.7}),
        PairSpec("STANKOVIC_HALF", {"rho": -0.5, "beta": 0.8}),
        PairSpec("STANKOVIC_HALF", {"rho": -0.4, "beta": 1.1}),
        PairSpec("STANKOVIC_TRIG", {"rho": -0.5, "beta": 0.5}),
        PairSpec("STANKOVIC_TRIG", {"rho": -0.25, "beta": 0.8}),
    ]
    return entries


def moments(params: WrightParams, n: int) -> float:
    """n-th moment of phi(rho, beta; -t) on (0, inf): n!/Gamma(-rho n + beta - rho).

    Raises PoleError when the gamma argument is a non-positive integer.
    """
    if not -1.0 < params.rho < 0.0:
        raise DomainError("moments need -1 < rho < 0")
    if n < 0 or n != int(n):
        raise DomainError("moment order must be a non-negative integer")
    beta = complex(params.beta)
    arg = -params.rho * n + beta - params.rho
    value = math.factorial(int(n)) / complex_gamma(arg)  # PoleError at poles
    return value.real if abs(value.imag) < 1e-13 * abs(value) else value


def moment_quadrature(params: WrightParams, n: int, tol: float = 1e-10) -> float:
    """Brute-force int_0^inf t^n phi(rho, beta; -t) dt for cross-checks."""
    if not -1.0 < params.rho < 0.0:
        raise DomainError("moment quadrature needs -1 < rho < 0")
    rho, beta = params.rho, params.beta

    def f(t):
        return t**n * _phi_real(rho, beta, -t)

    head, e1 = adaptive_panel(f, 0.0, 1.0, tol)
    tail, e2 = integrate_to_infinity(f, 1.0, tol)
    return head + tail


def djrbashian_check(alpha2: float, beta2: float, z: float,
                     tol: float = 1e-8):
    """Optional slow identity check with the inner index fixed at 1:
    E_{alpha2, beta2}(z) = int_0^inf e^(z t) phi(-alpha2, beta2-alpha2; -t) dt
    for z < 0 and 0 < alpha2 < 1.  Returns (lhs, rhs, rel_dev)."""
    if not 0 < alpha2 < 1:
        raise DomainError("needs 0 < alpha2 < 1 (inner index is 1)")
    if z >= 0:
        raise DomainError("checked on the negative axis only")
    lhs, _ = laplace_forward(
        lambda t: _phi_real(-alpha2, beta2 - alpha2, -t), -z, tol=tol
    )
    rhs = _as_real(ml_series(MLParams(alpha2, beta2), z, tol=1e-14))
    return lhs, rhs, abs(lhs - rhs) / max(abs(rhs), 1e-300)
