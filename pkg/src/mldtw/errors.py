"""Exception types raised across the package."""


class DimensionMismatchError(ValueError):
    """Two series (or points) do not share the same number of values per sample."""


class DisconnectedRegionError(RuntimeError):
    """The bottom-right cell of a cost matrix is unreachable (still infinite)."""


class ModelFormatError(ValueError):
    """A serialized model file is malformed."""


class ModelVersionError(ModelFormatError):
    """Magic bytes do not match a supported format version."""


class TruncatedModelError(ModelFormatError):
    """The payload is shorter (or longer) than its declared dimensions."""


class ChecksumError(ModelFormatError):
    """Trailing CRC32 does not match the file contents."""


class SeriesFormatError(ValueError):
    """A series CSV file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RaggedRowError(SeriesFormatError):
    pass


class NonNumericCellError(SeriesFormatError):
    pass


class EmptyFileError(SeriesFormatError):
    pass


class DegenerateLabelsError(ValueError):
    """A classifier would see fewer than two distinct labels."""
