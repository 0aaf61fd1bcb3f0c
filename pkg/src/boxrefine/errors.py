"""Exception hierarchy shared across the package.

Data problems (malformed files, broken referential integrity, corrupted
binary containers) and numeric failures (non-finite activations, diverged
training) are kept distinct so the CLI can map them to different exit codes.
"""


class BoxRefineError(Exception):
    """Base class for all package-specific errors."""


class DataError(BoxRefineError):
    """Malformed or inconsistent input data."""


class FormatError(DataError):
    """A binary or JSON container violates its declared layout."""


class ChecksumError(FormatError):
    """Stored checksum does not match the payload."""


class VersionError(FormatError):
    """Container version differs from the one this build understands."""

    def __init__(self, found: int, expected: int):
        super().__init__(f"unsupported format version {found} (expected {expected})")
        self.found = found
        self.expected = expected


class NumericError(BoxRefineError):
    """A computation produced non-finite values."""
