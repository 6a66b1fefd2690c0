"""Exception hierarchy shared by all solver stages."""


class PlankError(Exception):
    """Base class; ``code`` is the stable identifier used in CLI error output."""

    code = "PlankError"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details


class InvalidMatrix(PlankError):
    code = "InvalidMatrix"


class InvalidDimension(PlankError):
    code = "InvalidDimension"


class NotPSD(PlankError):
    code = "NotPSD"


class InvalidOrthogonal(PlankError):
    code = "InvalidOrthogonal"


class NullRow(PlankError):
    code = "NullRow"


class DegenerateDiagonal(PlankError):
    code = "DegenerateDiagonal"


class NoConvergence(PlankError):
    """Scaling iteration ran out of budget; ``result`` holds the best iterate."""

    code = "NoConvergence"

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NotSymmetric(PlankError):
    code = "NotSymmetric"


class FlipBudgetExceeded(PlankError):
    """Sign search hit its flip budget; ``signs`` and ``violations`` describe the last iterate."""

    code = "FlipBudgetExceeded"

    def __init__(self, message, signs=None, violations=None):
        super().__init__(message)
        self.signs = signs
        self.violations = violations


class CertificateViolation(PlankError):
    code = "CertificateViolation"


class InsufficientSlack(PlankError):
    code = "InsufficientSlack"


class ResolutionTooCoarse(PlankError):
    code = "ResolutionTooCoarse"


class NonNormable(PlankError):
    code = "NonNormable"


class NotNormalized(PlankError):
    code = "NotNormalized"


class NullNormal(PlankError):
    code = "NullNormal"


class TooLarge(PlankError):
    code = "TooLarge"


class InstanceError(PlankError):
    """An instance file parsed but violates a domain invariant."""

    code = "InstanceError"


class ParseError(PlankError):
    """Malformed instance or solution file; ``field`` / ``line`` locate the problem."""

    code = "ParseError"

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line
