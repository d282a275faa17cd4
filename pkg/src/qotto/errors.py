"""Exception hierarchy shared by all qotto modules."""


class QottoError(Exception):
    """Base class for every error raised by qotto."""


class DomainError(QottoError, ValueError):
    """A point or interval lies outside the region where an operation is defined."""


class SolverError(QottoError, RuntimeError):
    """A root finder or eigensolver failed to converge.

    Parameters
    ----------
    message : str
        Human readable description.
    bracket : tuple of float, optional
        Interval that was searched, when applicable.
    residual : float, optional
        Residual at the last iterate.
    """

    def __init__(self, message, bracket=None, residual=None):
        super().__init__(message)
        self.bracket = bracket
        self.residual = residual


class AccuracyError(QottoError, RuntimeError):
    """A requested accuracy could not be reached within the resource limits."""


class DomainTooSmallError(DomainError):
    """A finite DVR box clips bound-state wavefunctions."""


class TruncationError(QottoError, ValueError):
    """A spectrum has too few levels for the thermal truncation policy.

    Attributes
    ----------
    needed_energy : float
        Energy the highest retained level must reach.
    needed_levels : int or None
        Estimated number of levels required.
    """

    def __init__(self, message, needed_energy=None, needed_levels=None):
        super().__init__(message)
        self.needed_energy = needed_energy
        self.needed_levels = needed_levels


class AuditError(QottoError, AssertionError):
    """A thermodynamic consistency check failed."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(QottoError, ValueError):
    """A run configuration is malformed or violates a precondition."""
