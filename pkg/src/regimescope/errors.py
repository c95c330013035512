"""Exception hierarchy.

Two families matter to the command line: ``ParameterError`` (bad flags or
arguments, exit code 1) and ``DataError`` (the input data cannot support the
requested computation, exit code 2).
"""

from __future__ import annotations


class RegimeScopeError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(RegimeScopeError, ValueError):
    """An argument is outside its valid domain."""


class UnknownCommand(ParameterError):
    pass


class BadFlag(ParameterError):
    pass


class InvalidQ(ParameterError):
    pass


class UnsupportedKind(ParameterError):
    pass


class DataError(RegimeScopeError):
    """The data cannot support the requested computation.

    ``row`` is the 1-based physical line number in the source CSV (header is
    line 1) and ``date`` the ISO date involved, when known.
    """

    def __init__(self, message: str, *, row: int | None = None, date: str | None = None):
        self.row = row
        self.date = date
        where = []
        if row is not None:
            where.append(f"line {row}")
        if date is not None:
            where.append(date)
        if where:
            message = f"{message} [{', '.join(where)}]"
        super().__init__(message)


class MalformedRow(DataError):
    pass


class NonPositiveValue(DataError):
    pass


class DuplicateDate(DataError):
    pass


class NonContiguousPe(DataError):
    pass


class NoPeCoverage(DataError):
    pass


class EmptyResult(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class TotalLoss(DataError):
    pass


class EmptySet(DataError):
    pass


class DegenerateSample(DataError):
    pass


class EmptyMonth(DataError):
    pass


class NoMatches(DataError):
    pass


class TooShort(DataError):
    pass


class DegenerateSeries(DataError):
    pass


class InsufficientNeighbors(DataError):
    pass


class LengthMismatch(DataError):
    pass


class DegenerateMarginal(DataError):
    pass


class DegenerateMarginalWarning(UserWarning):
    """A marginal collapsed to a single bin; the dependence measure is 0."""
