"""Arithmetic backends.

Every evaluator in this package runs on one of two scalar backends:

* ``double`` -- hardware ``complex`` arithmetic with the package's own
  gamma kernels; the default.
* ``extended`` -- mpmath arbitrary precision, used when a series loses
  too many digits to cancellation or a value leaves the double range.

The environment variable ``WRIGHTLAB_PRECISION`` (``double`` or
``extended``) selects the default backend for the whole process.
"""

from __future__ import annotations

import cmath
import contextlib
import math
import os

import mpmath

from .errors import DomainError

_ENV_VAR = "WRIGHTLAB_PRECISION"


class DoubleContext:
    """Plain ``complex``/``float`` arithmetic."""

    name = "double"
    eps = 2.220446049250313e-16
    pi = math.pi

    def workprec(self):
        return contextlib.nullcontext()

    def to(self, z):
        return complex(z)

    def exp(self, z):
        return cmath.exp(z)

    def log(self, z):
        return cmath.log(z)

    def sqrt(self, z):
        return cmath.sqrt(z)

    def power(self, z, w):
        # principal branch, 0**0 == 1 to match series conventions
        if z == 0:
            if complex(w) == 0:
                return 1.0 + 0.0j
            return 0.0 + 0.0j
        return cmath.exp(complex(w) * cmath.log(z))

    def gamma(self, z):
        from . import gammakit

        return gammakit.complex_gamma(z)

    def rgamma(self, z):
        from . import gammakit

        return gammakit.reciprocal_gamma(z)

    def mag(self, z):
        """Magnitude as a plain float (inf on overflow)."""
        try:
            return abs(complex(z))
        except OverflowError:
            return math.inf

    def is_finite(self, z):
        z = complex(z)
        return math.isfinite(z.real) and math.isfinite(z.imag)

    def to_complex(self, z):
        return complex(z)


class ExtendedContext:
    """mpmath arbitrary-precision arithmetic at a fixed working dps."""

    name = "extended"

    def __init__(self, dps=40):
        if dps < 16:
            raise DomainError("extended backend needs dps >= 16")
        self.dps = int(dps)
        self.eps = 10.0 ** (1 - self.dps)
        self.pi = math.pi

    def workprec(self):
        return mpmath.workdps(self.dps)

    def to(self, z):
        if isinstance(z, (mpmath.mpf, mpmath.mpc)):
            return z
        z = complex(z)
        return mpmath.mpc(z.real, z.imag)

    def exp(self, z):
        return mpmath.exp(z)

    def log(self, z):
        return mpmath.log(z)

    def sqrt(self, z):
        return mpmath.sqrt(z)

    def power(self, z, w):
        if z == 0:
            return mpmath.mpc(1) if w == 0 else mpmath.mpc(0)
        return mpmath.exp(self.to(w) * mpmath.log(z))

    def gamma(self, z):
        return mpmath.gamma(z)

    def rgamma(self, z):
        return mpmath.rgamma(z)

    def mag(self, z):
        a = mpmath.fabs(z)
        try:
            return float(a)
        except OverflowError:
            return math.inf

    def is_finite(self, z):
        return mpmath.isfinite(z)

    def to_complex(self, z):
        try:
            return complex(z)
        except OverflowError:
            z = mpmath.mpc(z)
            return complex(
                math.copysign(math.inf, float(mpmath.sign(z.real or 1))),
                0.0,
            )


DOUBLE = DoubleContext()


def default_backend_name():
    value = os.environ.get(_ENV_VAR, "double").strip().lower()
    if value not in ("double", "extended"):
        raise DomainError(
            f"{_ENV_VAR} must be 'double' or 'extended', got {value!r}"
        )
    return value


def resolve(backend=None, dps=None):
    """Map a backend spec (name, context or None) onto a context object."""
    if isinstance(backend, (DoubleContext, ExtendedContext)):
        return backend
    name = backend if backend is not None else default_backend_name()
    if name == "double":
        return DOUBLE
    if name == "extended":
        return ExtendedContext(dps=dps or 40)
    raise DomainError(f"unknown backend {backend!r}")
