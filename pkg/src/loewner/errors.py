"""Exception hierarchy for the Loewner toolkit.

Errors split into two families so that the command line can map them onto
distinct exit codes: :class:`ValidationError` for bad inputs and
configurations, :class:`NumericalError` for failures inside the linear
algebra.
"""


class LoewnerError(Exception):
    """Base class of every error raised by this package."""


class ValidationError(LoewnerError, ValueError):
    """Inputs violate a documented precondition."""


class NumericalError(LoewnerError, ArithmeticError):
    """A numerical operation could not produce a trustworthy result."""


class DataError(LoewnerError):
    """A file could not be read or written under its schema."""


# -- lti-core ---------------------------------------------------------------

class InvalidRange(ValidationError):
    pass


class DimensionTooLarge(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class SingularPencil(NumericalError):
    """``s*E - A`` is singular to working precision: ``s`` is a pole."""


class PoleHit(SingularPencil):
    """A sampling frequency coincides with a pole of the system."""

    def __init__(self, msg, omega=None):
        super().__init__(msg)
        self.omega = omega


# -- data-io ----------------------------------------------------------------

class DuplicateFrequency(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class ParseError(DataError):
    def __init__(self, msg, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            msg = f"{', '.join(where)}: {msg}"
        super().__init__(msg)
        self.line = line
        self.field = field


class SchemaMismatch(DataError):
    pass


# -- partition --------------------------------------------------------------

class TooFewSamples(ValidationError):
    pass


class NotImaginaryAxis(ValidationError):
    pass


class PairingError(ValidationError):
    pass


# -- loewner-core -----------------------------------------------------------

class CoincidentPoints(ValidationError):
    pass


class RealifyResidueTooLarge(NumericalError):
    pass


class ROutOfRange(ValidationError):
    pass


class SingularEt(NumericalError):
    """The reduced descriptor matrix is singular for the requested order."""
