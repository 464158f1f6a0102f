"""
Exception hierarchy for planar-beltrami.

Every error raised on purpose by the package derives from BeltramiError.
Input-shaped problems also derive from ValueError and numerical failures
from ArithmeticError, so callers may catch either family.
"""

from typing import Optional


class BeltramiError(Exception):
    """Base class for all package errors."""


class ConfigError(BeltramiError, ValueError):
    """A run configuration or problem file is malformed."""


# =============================================================================
# Quadrature
# =============================================================================


class QuadratureError(BeltramiError, ArithmeticError):
    """Base class for integration failures."""


class NonConvergence(QuadratureError):
    """The adaptive subdivision budget was exhausted."""

    def __init__(self, message: str, panels: Optional[int] = None):
        super().__init__(message)
        self.panels = panels


class NonFiniteSample(QuadratureError):
    """The integrand returned NaN or an infinity."""

    def __init__(self, point: float):
        super().__init__(f"Integrand is not finite at y={point!r}")
        self.point = point


# =============================================================================
# Domains and orders
# =============================================================================


class OutOfDomain(BeltramiError, ValueError):
    """An evaluation point lies outside the admissible interval."""


class NOrderExceeded(BeltramiError, ValueError):
    """A formal power of higher order than was tabulated was requested."""


class ParseError(BeltramiError, ValueError):
    """The alpha expression does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainError(BeltramiError, ValueError):
    """alpha vanishes, changes sign or is not finite at a sample point."""

    def __init__(self, message: str, point: Optional[float] = None):
        super().__init__(message)
        self.point = point


class NoPositivityWindow(BeltramiError, ValueError):
    """f0 vanishes at the anchor point, so no positive window exists."""


# =============================================================================
# Residual checks and fitting
# =============================================================================


class CompatibilityError(BeltramiError, ArithmeticError):
    """Phi violates the compatibility condition of the antiderivative operator."""

    def __init__(self, residual: float, tolerance: float):
        super().__init__(
            f"Compatibility residual {residual:.3e} exceeds tolerance {tolerance:.1e}"
        )
        self.residual = residual
        self.tolerance = tolerance


class ResidualError(BeltramiError, ArithmeticError):
    """A field handed to a transfer formula does not solve its equation."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message}: residual {residual:.3e}")
        self.residual = residual


class IllConditioned(BeltramiError, ArithmeticError):
    """The collocation matrix is too ill-conditioned to solve without regularization."""

    def __init__(self, condition: float):
        super().__init__(
            f"Collocation matrix condition estimate {condition:.3e} exceeds 1e14; "
            "set a positive regularization"
        )
        self.condition = condition


class DimensionMismatch(BeltramiError, ValueError):
    """Boundary points, data and basis sizes disagree."""
