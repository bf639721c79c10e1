"""Exception hierarchy shared by all daelab modules.

Every error carries a machine-readable ``code`` so the CLI can emit it in
reports without string parsing.
"""

from __future__ import annotations


class DaelabError(Exception):
    """Base class for all daelab errors."""

    code = "ERROR"


class DimensionMismatch(DaelabError):
    code = "DIMENSION_MISMATCH"


class NotInResolventSet(DaelabError):
    """lambda*E - A is singular (or numerically indistinguishable from it)."""

    code = "NOT_IN_RESOLVENT_SET"

    def __init__(self, lam, condition=None, message=None):
        self.lam = lam
        self.condition = condition
        if message is None:
            message = f"lambda = {lam} is not in the resolvent set"
            if condition is not None:
                message += f" (condition {condition:.3e})"
        super().__init__(message)


class NotRegular(DaelabError):
    code = "NOT_REGULAR"


class InconsistentInitialValue(DaelabError):
    code = "INCONSISTENT_INITIAL_VALUE"

    def __init__(self, message, certificate=None):
        self.certificate = certificate
        super().__init__(message)


class ValidationFailed(DaelabError):
    code = "VALIDATION_FAILED"

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class QSingular(DaelabError):
    code = "Q_SINGULAR"


class InvalidConfig(DaelabError):
    code = "INVALID_CONFIG"


class ParseError(DaelabError):
    code = "PARSE_ERROR"
