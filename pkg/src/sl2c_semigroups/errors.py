"""Exception types raised by the series engines, oracles and matrix pipeline."""


class DomainError(ValueError):
    """Argument outside the domain where the quantity is defined."""


class RegimeError(ValueError):
    """Spectral parameters belong to a different regime than the one requested."""


class NonConvergence(ArithmeticError):
    """A truncated series could not be certified to the requested tolerance."""

    def __init__(self, message, bound=None, target=None):
        super().__init__(message)
        self.bound = bound
        self.target = target


class ToleranceNotMet(ArithmeticError):
    """Adaptive quadrature stopped refining before reaching its tolerance."""


class GridMismatch(ValueError):
    """Two sampled densities do not share a common uniform spacing."""


class StructureError(ArithmeticError):
    """A matrix lacks the block structure an operation relies on."""


class InsufficientAcceptance(RuntimeError):
    """Too few Monte Carlo paths landed in the conditioning annulus."""
