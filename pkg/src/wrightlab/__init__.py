"""wrightlab: numerics for the Wright function and fractional diffusion-wave problems.

Subpackages follow the functional split:

- ``gammakit``        complex gamma kernels
- ``core``            Wright function evaluators and Mainardi functions
- ``asymptotics``     large-argument expansions and sector dispatch
- ``mittag_leffler``  two-parameter Mittag-Leffler function
- ``growth``          order, type and indicator formulas
- ``zeros``           zero seeds, Newton refinement, indicator measurements
- ``laplace``         forward Laplace transform and the transform-pair catalog
- ``fpde``            fractional diffusion-wave machinery
- ``cli``             command-line front end
"""

from .core import (
    ContourSpec,
    EvalOutcome,
    WrightParams,
    mainardi_f,
    mainardi_m,
    phi_eval,
    phi_taylor,
    phi_hankel,
)
from .growth import GrowthData, order_type

__version__ = "0.1.0"

__all__ = [
    "WrightParams",
    "EvalOutcome",
    "ContourSpec",
    "phi_eval",
    "phi_taylor",
    "phi_hankel",
    "mainardi_m",
    "mainardi_f",
    "GrowthData",
    "order_type",
    "__version__",
]
