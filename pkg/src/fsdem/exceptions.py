"""Exception hierarchy shared by every module."""


class FsdemError(Exception):
    pass


class InvalidInputError(FsdemError, ValueError):
    pass


class InvalidRangeError(FsdemError, ValueError):
    pass


class DegenerateSelectionError(FsdemError, ValueError):
    """Nogueira's denominator vanishes (every run selects all or none)."""


class UndefinedIndexError(FsdemError, ValueError):
    """Consistency index is undefined for k == 0 or k == d."""


class DataFormatError(FsdemError):
    """Input file could not be parsed; message carries row/column."""

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class IngestionError(FsdemError):
    pass
