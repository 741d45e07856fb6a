"""Exception taxonomy shared across the package.

Every error carries a stable ``code`` (the class name) so the HTTP layer can
serialize failures as ``{"error": code, "message": text}`` without a lookup
table.
"""


class SubstraceError(Exception):
    """Base class; ``code`` is the machine-readable error identifier."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- value / series level ---------------------------------------------------

class EmptyInput(SubstraceError):
    pass


class InvalidValue(SubstraceError):
    pass


class InvalidWindow(SubstraceError):
    pass


class ShapeError(SubstraceError):
    pass


class InvalidWeight(SubstraceError):
    pass


# --- file parsing -----------------------------------------------------------

class RowError(SubstraceError):
    """Parse failure tied to a 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SchemaError(RowError):
    pass


class FieldValueError(RowError, ValueError):
    """Unparseable field content; also catchable as a plain ValueError."""


# --- roles / mechanisms -----------------------------------------------------

class EmptyDay(SubstraceError):
    pass


class InvalidDuration(SubstraceError):
    pass


class UndefinedDenominator(SubstraceError):
    pass


class NoAttributes(SubstraceError):
    pass


class UnknownAttribute(SubstraceError):
    pass


class InsufficientProjects(SubstraceError):
    pass


class AlignmentError(SubstraceError):
    pass


class EmptyWindow(SubstraceError):
    pass


# --- clustering -------------------------------------------------------------

class InvalidK(SubstraceError):
    pass


class TooManyClusters(SubstraceError):
    pass


class NumericalFailure(SubstraceError):
    def __init__(self, message: str, iteration: int | None = None):
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.iteration = iteration


# --- flow graph -------------------------------------------------------------

class InvalidBarycentric(SubstraceError):
    pass


class StaleInput(SubstraceError):
    pass


class NotFound(SubstraceError):
    pass


# --- growth fitting ---------------------------------------------------------

class InvalidInitial(SubstraceError):
    pass


class InvalidTime(SubstraceError):
    pass


class InsufficientData(SubstraceError):
    pass


# --- simulator --------------------------------------------------------------

class ScaleTooLarge(SubstraceError):
    pass


class InsufficientPairs(SubstraceError):
    pass


# --- server -----------------------------------------------------------------

class ServiceNotReady(SubstraceError):
    pass


class NotAlive(SubstraceError):
    pass


class SamePair(SubstraceError):
    pass
