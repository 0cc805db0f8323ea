"""Exception hierarchy. Each class maps to one CLI exit code."""


class UwbError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class ArgumentError(UwbError, ValueError):
    """Invalid argument or precondition."""

    exit_code = 1


class DomainError(UwbError, ValueError):
    """Numeric input outside the domain of a formula (e.g. log of zero)."""

    exit_code = 3


class DegenerateFitError(ArgumentError):
    """A density fit cannot proceed, typically zero variance."""

    exit_code = 3


class ParseError(UwbError):
    """Malformed row or value in an input file."""

    exit_code = 2


class FormatError(UwbError):
    """Unknown header, version, or truncated file."""

    exit_code = 2


class ModelStateError(UwbError):
    """Model is missing state required by the operation (e.g. threshold)."""

    exit_code = 1


class DetectionError(UwbError):
    """Time-of-arrival detection found no usable signal."""

    exit_code = 3
