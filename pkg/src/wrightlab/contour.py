"""Keyhole (Hankel-path) contour quadrature.

The path consists of a circle of radius ``r0`` around the origin joined
to two rays that hug the branch cut ``arg z = pi`` at angles
``+-cut_hug_angle``.  Rays are parametrised logarithmically, the arc by
angle.  Integration works on the *log* of the integrand: a cheap
double-precision magnitude scan locates the windows where the integrand
is within ``depth`` nats of its maximum (plus analytically supplied
saddle hints), and only those windows are quadratured, with trapezoid
sums under node doubling.  Everything is evaluated relative to the
contour maximum, so results far outside the double range survive on the
extended backend.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._backend import DoubleContext, resolve
from .errors import DomainError, QuadratureDivergence

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ContourSpec:
    """Shape parameters for the keyhole path.

    ``radius`` of the joining circle, the angle at which the rays hug
    the cut, and the initial trapezoid node count per active window.
    """

    node_count: int = 256
    radius: float = 1.0
    cut_hug_angle: float = 0.95 * math.pi

    def __post_init__(self):
        if self.node_count < 16:
            raise DomainError("node_count must be >= 16")
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise DomainError("radius must be positive and finite")
        if not (0.5 * math.pi < self.cut_hug_angle < math.pi):
            raise DomainError("cut_hug_angle must lie in (pi/2, pi)")


@dataclass
class _Window:
    piece: str          # "ray_low", "arc", "ray_up"
    lo: float
    hi: float


class _Piece:
    """One smooth piece of the keyhole path, parametrised by u."""

    def __init__(self, kind, lo, hi, r0, theta, sign):
        self.kind = kind
        self.lo = lo
        self.hi = hi
        self.r0 = r0
        self.theta = theta
        self.sign = sign

    def zeta(self, u):
        if self.kind == "arc":
            return self.r0 * np.exp(1j * u)
        phase = self.theta if self.kind == "ray_up" else -self.theta
        return np.exp(u + 1j * phase)

    def dzeta(self, u):
        if self.kind == "arc":
            return 1j * self.r0 * np.exp(1j * u)
        phase = self.theta if self.kind == "ray_up" else -self.theta
        return np.exp(u + 1j * phase)

    def zeta_scalar(self, u, ctx):
        if self.kind == "arc":
            return self.r0 * ctx.exp(ctx.to(1j * u))
        phase = self.theta if self.kind == "ray_up" else -self.theta
        return ctx.exp(ctx.to(complex(u, phase)))

    def measure_log(self, u):
        """log |dzeta/du| along the piece."""
        if self.kind == "arc":
            return np.full_like(np.asarray(u, dtype=float), math.log(self.r0))
        return np.asarray(u, dtype=float)


def keyhole_integral(
    w_vec,
    r0,
    theta,
    *,
    ctx=None,
    w_scalar=None,
    initial_nodes=256,
    rel_tol=1e-11,
    max_nodes=32768,
    hint_angles=(),
    scan_hook=None,
    max_ray_log=200.0,
):
    """(1/2 pi i) * integral of exp(w(zeta)) over the keyhole path.

    Parameters
    ----------
    w_vec : callable
        Vectorised complex log of the integrand: ndarray[complex] ->
        ndarray[complex].  Used for scanning and for double-backend
        quadrature.
    r0, theta : float
        Circle radius and ray angle.
    ctx : backend context
        Double (default) or extended; extended needs ``w_scalar``.
    w_scalar : callable
        (zeta, ctx) -> ctx complex scalar, the same log-integrand.
    hint_angles : iterable of float
        Arc angles (saddle locations) that must get a window even if the
        coarse scan misses their peak.
    scan_hook : callable
        Called with every scanned zeta array; may raise (pole checks).

    Returns
    -------
    (value, abs_err, nodes) with value in ctx arithmetic.
    """
    ctx = ctx or DoubleContext()
    extended = ctx.name == "extended"
    if extended and w_scalar is None:
        raise DomainError("extended keyhole integration needs w_scalar")

    if extended:
        digits = ctx.dps
    else:
        digits = 15.5
    depth = digits * math.log(10.0) + 20.0

    x0 = math.log(r0)
    pieces = [
        _Piece("ray_low", x0, x0 + 2.0, r0, theta, -1.0),
        _Piece("arc", -theta, theta, r0, theta, 1.0),
        _Piece("ray_up", x0, x0 + 2.0, r0, theta, 1.0),
    ]

    def scan(piece, lo, hi, n=2049):
        u = np.linspace(lo, hi, n)
        zeta = piece.zeta(u)
        if scan_hook is not None:
            scan_hook(zeta)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            w = w_vec(zeta)
            lm = np.real(w) + piece.measure_log(u)
        lm = np.where(np.isfinite(lm), lm, -math.inf)
        return u, lm

    # Extend the rays until the integrand has decayed `depth` below the
    # running maximum (the maximum itself may still grow while we extend).
    ray_hi = x0 + 2.0
    while True:
        scans = {}
        gmax = -math.inf
        for piece in pieces:
            if piece.kind != "arc":
                piece.hi = ray_hi
            u, lm = scan(piece, piece.lo, piece.hi)
            scans[piece.kind] = (u, lm)
            gmax = max(gmax, float(np.max(lm)))
        tail = max(
            float(scans["ray_low"][1][-1]), float(scans["ray_up"][1][-1])
        )
        if tail < gmax - depth:
            break
        ray_hi += max(4.0, 0.25 * (ray_hi - x0))
        if ray_hi - x0 > max_ray_log:
            raise QuadratureDivergence(
                "keyhole rays do not decay; contour badly scaled "
                f"(r0={r0:.3g}, theta={theta:.3f})"
            )

    cutoff = gmax - depth

    windows = []
    for piece in pieces:
        u, lm = scans[piece.kind]
        mask = lm >= cutoff
        if not mask.any():
            continue
        idx = np.flatnonzero(mask)
        splits = np.flatnonzero(np.diff(idx) > 1)
        starts = np.concatenate(([0], splits + 1))
        ends = np.concatenate((splits, [idx.size - 1]))
        pad = 2
        for s, e in zip(starts, ends):
            i0 = max(0, idx[s] - pad)
            i1 = min(u.size - 1, idx[e] + pad)
            windows.append(_Window(piece.kind, float(u[i0]), float(u[i1])))

    # Saddle hints: make sure narrow peaks on the arc are not missed.
    arc = pieces[1]
    for ang in hint_angles:
        ang = min(max(ang, -theta + 1e-6), theta - 1e-6)
        zc = arc.zeta(np.array([ang]))
        lc = float(np.real(w_vec(zc))[0]) + math.log(r0)
        if lc < cutoff:
            continue
        half = max(2.0 * (2.0 * theta) / 2048.0, 1e-9)
        while half < theta:
            pts = arc.zeta(np.array([max(ang - half, -theta), min(ang + half, theta)]))
            lw = np.real(w_vec(pts)) + math.log(r0)
            if max(lw) < cutoff:
                break
            half *= 2.0
        windows.append(
            _Window("arc", max(ang - half, -theta), min(ang + half, theta))
        )

    windows = _merge_windows(windows)
    if not windows:
        # Integrand negligible everywhere relative to its own scale,
        # which cannot happen: the max itself defines the scale.
        raise QuadratureDivergence("no active windows found on the contour")

    shift = gmax
    piece_by_kind = {p.kind: p for p in pieces}
    total = ctx.to(0)
    err_acc = 0.0
    abs_acc = 0.0
    nodes_used = 0

    for win in windows:
        piece = piece_by_kind[win.piece]
        val, delta, absint, n = _trapezoid_doubling(
            piece, win, shift, ctx, w_vec, w_scalar,
            initial_nodes, max_nodes, rel_tol,
        )
        total = total + ctx.to(piece.sign) * val
        err_acc += delta
        abs_acc += absint
        nodes_used += n

    length = sum(w.hi - w.lo for w in windows)
    neglect = math.exp(min(700.0, cutoff - shift)) * (
        (ray_hi - x0) * 2 + 2 * theta + length
    )
    round_floor = ctx.eps * abs_acc

    scale = ctx.exp(ctx.to(shift))
    two_pi_i = ctx.to(2j * math.pi)
    value = scale * total / two_pi_i
    abs_err_scaled = (err_acc + neglect + round_floor) / _TWO_PI
    abs_err = _real_scaled(ctx, abs_err_scaled, shift)
    return value, abs_err, nodes_used


def _real_scaled(ctx, mantissa, shift):
    """mantissa * e^shift as a backend real (float for double)."""
    if ctx.name == "double":
        try:
            return mantissa * math.exp(shift)
        except OverflowError:
            return math.inf
    import mpmath

    return mpmath.mpf(mantissa) * mpmath.exp(mpmath.mpf(shift))


def _merge_windows(windows):
    out = []
    for win in sorted(windows, key=lambda w: (w.piece, w.lo)):
        if out and out[-1].piece == win.piece and win.lo <= out[-1].hi:
            out[-1].hi = max(out[-1].hi, win.hi)
        else:
            out.append(_Window(win.piece, win.lo, win.hi))
    return out


def _kress(t):
    """Smoothing map [0,1]->[0,1] with cubic-order end derivatives.

    Trapezoid sums on the transformed parameter converge like a high
    order rule even when the integrand is O(1) at the window edges
    (piece junctions), since the measure s'(t) = 140 t^3 (1-t)^3
    vanishes there."""
    return t**4 * (35.0 - 84.0 * t + 70.0 * t**2 - 20.0 * t**3)


def _kress_d(t):
    return 140.0 * t**3 * (1.0 - t) ** 3


def _trapezoid_doubling(
    piece, win, shift, ctx, w_vec, w_scalar, n0, n_max, rel_tol
):
    """Trapezoid sums of exp(w - shift) * dzeta over [lo, hi], doubling.

    Runs on the Kress-smoothed parameter; the zero end weights make the
    composite trapezoid rapidly convergent on each analytic piece."""
    lo, hi = win.lo, win.hi
    if hi <= lo:
        return ctx.to(0), 0.0, 0.0, 0
    extended = ctx.name == "extended"
    span = hi - lo

    def sums(n):
        t = np.arange(1, n) / n
        u = lo + span * _kress(t)
        mfac = span * _kress_d(t)
        h = 1.0 / n
        if not extended:
            zeta = piece.zeta(u)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                w = w_vec(zeta) - shift
                g = np.exp(w) * piece.dzeta(u) * mfac
            g = np.where(np.isfinite(g), g, 0.0)
            return h * np.sum(g), float(h * np.sum(np.abs(g)))
        import mpmath

        sh = ctx.to(shift)
        acc = ctx.to(0)
        aac = mpmath.mpf(0)
        for ui, mi in zip(u, mfac):
            zeta = piece.zeta_scalar(float(ui), ctx)
            g = ctx.exp(w_scalar(zeta, ctx) - sh) * zeta * (
                1j if piece.kind == "arc" else 1.0
            ) * mi
            acc += g
            aac += mpmath.fabs(g)
        return acc * h, float(aac * h)

    prev, prev_abs = sums(n0)
    n = 2 * n0
    nodes = n0 + 1
    last_delta = None
    while n <= n_max:
        cur, cur_abs = sums(n)
        nodes += n + 1
        delta = ctx.mag(cur - prev)
        target = rel_tol * max(ctx.mag(cur), prev_abs * 1e-4) + 1e-320
        if delta <= target:
            return cur, delta, cur_abs, nodes
        prev, prev_abs, last_delta = cur, cur_abs, delta
        n *= 2
    return prev, last_delta if last_delta is not None else prev_abs, prev_abs, nodes
