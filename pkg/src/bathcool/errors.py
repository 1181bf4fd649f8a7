"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, PhysicsError
subclasses -> 2, NumericsError -> 3.
"""


class BathcoolError(Exception):
    """Base class for all package errors."""

    kind = "error"


class ConfigError(BathcoolError):
    """Malformed or invalid configuration / usage."""

    kind = "config_error"


class PhysicsError(BathcoolError):
    """A physical precondition is violated (instability, regime, fit)."""

    kind = "physics_error"


class UnstableSystemError(PhysicsError):
    kind = "unstable_system"


class RegimeError(PhysicsError):
    kind = "out_of_regime"


class FitFailureError(PhysicsError):
    kind = "fit_failure"


class CoverageError(PhysicsError):
    """Spectrum grid does not cover enough of the resonance tails."""

    kind = "insufficient_coverage"


class NumericsError(BathcoolError):
    """Numerical failure (singular solve, excess negative spectrum, ...)."""

    kind = "numerical_failure"
