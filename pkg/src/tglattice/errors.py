"""Exception hierarchy for tglattice."""


class TGError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TGError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ConfigError(DomainError):
    """A configuration file or object is invalid."""


class UnsupportedStatisticsError(DomainError):
    """Particle number or statistics not supported (e.g. even N with periodic orbitals)."""


class DegeneracyError(DomainError):
    """Two orbitals expected to form a degenerate +/- nu pair do not."""


class NumericalError(TGError, ArithmeticError):
    """An iterative numerical procedure failed to converge."""

    def __init__(self, message, **diagnostics):
        self.diagnostics = diagnostics
        if diagnostics:
            detail = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
            message = f"{message} ({detail})"
        super().__init__(message)
