"""momentlab: exact and high-precision analysis of probability moment sequences."""

__version__ = "0.1.0"

from .exceptions import BackendError, MomentlabError, PrecisionError, QuadratureError
from .moment_algebra import (
    BooleanCumulantSequence,
    CumulantSequence,
    MomentSequence,
    TPolynomial,
)

__all__ = [
    "BackendError",
    "BooleanCumulantSequence",
    "CumulantSequence",
    "MomentSequence",
    "MomentlabError",
    "PrecisionError",
    "QuadratureError",
    "TPolynomial",
    "__version__",
]
