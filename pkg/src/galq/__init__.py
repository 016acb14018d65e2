"""galq: coset actions of the extended Galilei group, canonical coherent
states on a truncated Fock space, the symplectic form of Schrodinger
dynamics, and explicit hbar -> 0 contraction sweeps."""

__version__ = "0.1.0"

from . import algebra, coherent, contraction, coset, fock, projective
from .errors import (
    DegenerateFitError,
    GalqError,
    LimitDivergenceError,
    ParseError,
    PrecisionError,
    ToleranceError,
    ValidationError,
)

__all__ = [
    "__version__",
    "algebra",
    "coset",
    "fock",
    "coherent",
    "projective",
    "contraction",
    "GalqError",
    "ValidationError",
    "ParseError",
    "LimitDivergenceError",
    "PrecisionError",
    "DegenerateFitError",
    "ToleranceError",
]
