"""Exception types shared across the package."""


class QbbmError(Exception):
    """Base class for all package errors."""


class DomainError(QbbmError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnknownKind(QbbmError, ValueError):
    """Unrecognized Taylor-model kind."""


class InconsistentClassification(QbbmError):
    """Analytic resonance classification and numerical root scan disagree.

    Raised instead of silently picking a side: a disagreement means either a
    bug in the scalar functions or a genuine gap in the classification table.
    """


class BracketFailure(QbbmError):
    """A bracketing root search could not find a sign change."""


class InvalidGrid(QbbmError, ValueError):
    """Grid parameters violate the collocation requirements."""


class BandOutOfRange(QbbmError, ValueError):
    """Dyadic band does not intersect the resolved wavenumber range."""


class StabilityViolation(QbbmError):
    """Time step produced unphysical norm growth."""


class BoundaryContamination(QbbmError):
    """Field amplitude reached the periodic boundary above tolerance."""


class InsufficientData(QbbmError, ValueError):
    """Not enough samples in the requested fit window."""


class InsufficientSpan(QbbmError, ValueError):
    """Trajectory does not cover the requested time range."""


class CostGuard(QbbmError, ValueError):
    """Requested brute-force computation exceeds the allowed size."""
