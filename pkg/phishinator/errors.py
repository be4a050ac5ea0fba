"""Exceptions and warnings raised across phishinator."""

from typing import Optional


class DatasetError(ValueError):
    """A dataset file or table that does not conform to the schema.

    Parameters
    ----------
    message : str
        What went wrong.
    row : int, optional
        1-based data row (the header is row 0).
    column : str, optional
        Column name as written in the file.
    """

    def __init__(self, message: str, row: Optional[int] = None,
                 column: Optional[str] = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append('row %d' % row)
        if column is not None:
            where.append('column %r' % column)
        if where:
            message = '%s (%s)' % (message, ', '.join(where))
        super().__init__(message)


class UrlParseError(ValueError):
    """URL string without a usable host."""


class ConfigError(ValueError):
    """Invalid classifier spec, threshold table or run configuration."""


class ModelFormatError(ValueError):
    """Serialized model that cannot be read back."""


class DivergenceError(FloatingPointError):
    """Training loss became non-finite."""


class ConvergenceWarning(UserWarning):
    """Iterative trainer stopped at its cap before meeting tolerance."""
