"""
Exception hierarchy for tdpkit.

Every error raised by the engine derives from TdpkitError so the CLI can map
failures onto exit codes in one place. Verdicts (failed conditions, degenerate
spectra, non-q-Racah data) are returned as values and never raised.
"""

from typing import Any, Dict, Optional


class TdpkitError(ValueError):
    """Base class for all engine errors"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        payload = {"error": self.__class__.__name__, "message": str(self)}
        if self.details:
            payload["details"] = self.details
        return payload


# --- exactfield ---

class DivisionByZero(TdpkitError, ZeroDivisionError):
    pass


class MixedFields(TdpkitError):
    pass


class ExtensionHeightExceeded(TdpkitError):
    pass


class EvenCharacteristic(TdpkitError):
    pass


class NotAnExtension(TdpkitError):
    pass


class NotInBaseField(TdpkitError):
    pass


class ScalarParseError(TdpkitError):
    pass


# --- exactlinalg ---

class ZeroVector(TdpkitError):
    pass


class EigenvalueSearchFailed(TdpkitError):
    pass


class NotDiagonalizable(TdpkitError):
    pass


class Inconclusive(TdpkitError):
    pass


class TooLarge(TdpkitError):
    pass


class DimensionMismatch(TdpkitError):
    pass


# --- tdsystem ---

class RepeatedEigenvalue(TdpkitError):
    pass


class NotAPath(TdpkitError):
    pass


class InvalidOrdering(TdpkitError):
    pass


class NotATridiagonalPair(TdpkitError):
    pass


class InvariantViolation(TdpkitError):
    pass


# --- paramarray ---

class IndexOutOfRange(TdpkitError, IndexError):
    pass


class NotSharp(TdpkitError):
    pass


class NotScalarMultiple(TdpkitError):
    pass


class OnlyIfViolated(TdpkitError):
    pass


# --- qracah ---

class InvalidQRacahParameters(TdpkitError):
    pass


# --- synthesis ---

class ZeroPhi(TdpkitError):
    pass


class CandidateRejected(TdpkitError):
    """Raised with the failing tridiagonal-pair condition in details['condition']"""

    def __init__(self, message: str, condition: str, report: Optional[Dict[str, Any]] = None):
        super().__init__(message, {"condition": condition, "report": report or {}})
        self.condition = condition


class RelationNotConfirmed(TdpkitError):
    pass


class IdentityViolated(TdpkitError):
    pass


class ActionMismatch(TdpkitError):
    pass


class PolynomialParseError(TdpkitError):
    pass


# --- cli / corpus ---

class CapExceeded(TdpkitError):
    pass


class InputError(TdpkitError):
    """Malformed input file: carries an optional line/column location"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        details = {}
        if line is not None:
            details = {"line": line, "column": column}
        super().__init__(message, details)
        self.line = line
        self.column = column

    def diagnostic(self) -> str:
        if self.line is None:
            return str(self)
        return f"line {self.line}, column {self.column}: {self}"
