"""
Exception hierarchy shared by all lab modules.

Every error carries an ``exit_code`` used by the command-line layer and an
optional ``payload`` with the numbers that explain the failure.
"""


class HenonLabError(Exception):
    """Base class for lab errors."""

    exit_code = 1

    def __init__(self, message="", payload=None):
        super().__init__(message)
        self.payload = dict(payload or {})


class ValidationError(HenonLabError, ValueError):
    """Input rejected before any computation."""

    exit_code = 2


class RangeError(ValidationError):
    """Parameter outside its admissible range."""


class ParityError(ValidationError):
    """Nonlinearity exponent must be an odd integer."""


class DimensionError(ValidationError):
    """Only the three-dimensional radial problem is implemented."""


class DomainError(ValidationError):
    """Argument outside the domain of a function."""


class ConventionRequired(ValidationError):
    """A prefactor convention must be chosen explicitly."""


class GridMismatch(ValidationError):
    """Two sampled functions do not live on the same grid."""


class SchemaMismatch(ValidationError):
    """A result file does not match its declared schema."""


class OutOfHistory(ValidationError):
    """Requested time is not covered by a recorded history."""


class SingularNode(ValidationError):
    """Potential is not finite at a grid node."""


class SolverError(HenonLabError):
    """A numerical method failed or produced inconsistent output."""

    exit_code = 3


class MethodDisagreement(SolverError):
    """Two independent eigenvalue counts differ."""


class StiffnessError(SolverError):
    """ODE integration did not reach the end of the interval."""


class NoCrossing(HenonLabError):
    """No sign change of the lowest eigenvalue in the scanned interval."""

    exit_code = 0


class BlowupDetected(HenonLabError):
    """Similarity variables left the bounded regime."""

    exit_code = 4


class NoSignChange(HenonLabError):
    """Unstable coefficient has the same sign at both ends of the window."""

    exit_code = 5


class NoBlowup(HenonLabError):
    """Physical run reached its time limit without blowing up."""

    exit_code = 1
