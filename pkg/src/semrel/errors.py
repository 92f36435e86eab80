"""Exception types shared across the package.

Every error raised by the library derives from SemrelError so callers can
catch data problems without swallowing programming errors.
"""


class SemrelError(Exception):
    """Base class for all library errors."""


# vector primitives

class DimensionMismatch(SemrelError):
    """Two vectors (or an embedding and its declared dim) disagree in length."""


class ZeroVector(SemrelError):
    """A vector with zero norm was passed where a direction is required."""


class EmptyInput(SemrelError):
    """An aggregate operation received an empty sequence."""


# geometry

class DegenerateBox(SemrelError):
    """A bounding box has zero area after clipping."""


# image / saliency

class UnsupportedFormat(SemrelError):
    """The file is not one of the supported portable-map formats."""


class MalformedHeader(SemrelError):
    """A file header could not be parsed; message carries the byte offset."""


class NonPowerOfTwo(SemrelError):
    """FFT grid dimensions must be powers of two."""


# lexicon

class BadLine(SemrelError):
    """A word-vector line has the wrong field count or a non-numeric value."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


# relevance

class UnknownObject(SemrelError):
    """An object id was requested that does not exist in the scene."""


# bundle / table formats

class ParseError(SemrelError):
    """A document or CSV file is syntactically invalid."""


class SchemaError(SemrelError):
    """A document is missing a field or carries an ill-typed value."""


class BadHeader(SemrelError):
    """A CSV header does not match the expected column list."""


class BadRow(SemrelError):
    """A CSV row is malformed."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class DuplicateKey(SemrelError):
    """A key that must be unique appeared twice."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class IoError(SemrelError):
    """A file could not be read or written."""


# model fitting

class DegenerateCovariate(SemrelError):
    """A smooth covariate is constant and cannot support a basis."""


class SingularSystem(SemrelError):
    """The penalized normal equations are numerically singular."""


class TooFewRows(SemrelError):
    """Fewer usable rows than the fitting minimum (10)."""


class JoinFailure(SemrelError):
    """Joining fixations to metric rows produced too few matches."""
