"""Exception and warning types shared across the package."""


class SwimmerError(Exception):
    """Base class for all errors raised by spr3."""


class AdmissibilityError(SwimmerError, ValueError):
    """A shape or ball configuration leaves the admissible set (balls overlap)."""


class NumericalError(SwimmerError, ArithmeticError):
    """A linear solve is singular or too badly conditioned to trust."""


class ConfigError(SwimmerError, ValueError):
    """Invalid scenario configuration."""


class AsymptoticRegimeWarning(UserWarning):
    """The ball radius is not small compared to the arm length."""


class ExtractionWarning(UserWarning):
    """Finite-difference extraction error estimate exceeds its tolerance."""
