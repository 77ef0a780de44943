"""Convolution semigroups of Levy-Khintchine type on SL(2,C), their spectral
kernels, independent numerical oracles and the sp(4,R) matrix pipeline."""
from .errors import (DomainError, GridMismatch, InsufficientAcceptance, NonConvergence,
                     RegimeError, StructureError, ToleranceNotMet)
from .special import SpectralPoint

__version__ = "0.1.0"

__all__ = [
    "DomainError", "GridMismatch", "InsufficientAcceptance", "NonConvergence",
    "RegimeError", "SpectralPoint", "StructureError", "ToleranceNotMet",
]
