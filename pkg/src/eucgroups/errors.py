"""Exception hierarchy shared by every module."""


class EucGroupsError(Exception):
    """Base class for all errors raised by this package."""


class DivisionByZero(EucGroupsError, ZeroDivisionError):
    pass


class RealizationPole(EucGroupsError, ZeroDivisionError):
    """A denominator evaluates to zero at the declared realizations."""


class NonlinearCoordinate(EucGroupsError, ValueError):
    pass


class BudgetExceeded(EucGroupsError):
    """An enumeration would visit more points than the configured cap.

    ``reached`` records the largest coefficient bound that was attempted.
    """

    def __init__(self, message, reached=None):
        super().__init__(message)
        self.reached = reached


class NotInGroup(EucGroupsError, ValueError):
    pass


class LineMeetsGroup(EucGroupsError, ValueError):
    pass


class SupportExceeded(EucGroupsError, ValueError):
    pass


class RankDeficient(EucGroupsError, ValueError):
    pass


class ScalarSyntaxError(EucGroupsError, ValueError):
    def __init__(self, message, column=None):
        super().__init__(message if column is None else f"{message} (column {column})")
        self.reason = message
        self.column = column


class FileFormatError(EucGroupsError, ValueError):
    """Malformed input file; carries the 1-based line/column of the problem."""

    def __init__(self, message, path=None, line=None, column=None):
        where = path or "<input>"
        if line is not None:
            where = f"{where}:{line}:{column or 1}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line
        self.column = column
