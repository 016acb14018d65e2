"""Exception hierarchy shared by all galq modules.

The split matters for the CLI exit-code contract: ValidationError maps to
exit 1 (bad input), ToleranceError to exit 2 (numerical check failed).
"""


class GalqError(Exception):
    """Base class for all errors raised by galq."""


class ValidationError(GalqError):
    """Input violates a documented precondition or invariant."""


class ParseError(ValidationError):
    """A serialized table or config file could not be parsed.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class LimitDivergenceError(GalqError):
    """A structure constant diverges in the k -> infinity limit."""


class PrecisionError(GalqError):
    """Requested computation cannot meet its accuracy guard (e.g. Fock
    truncation tail too large for the given cutoff)."""


class DegenerateFitError(GalqError):
    """A fit was requested on data with no usable signal (identical labels)."""


class ToleranceError(GalqError):
    """A numerical result exceeded its acceptance tolerance."""
