"""Exception types shared across the library."""


class NotEnoughOccurrences(ValueError):
    """Raised by select-style queries when the requested occurrence does not exist."""


class DataFormatError(ValueError):
    """Raised when an input file or serialized blob cannot be parsed."""
