"""Exception hierarchy shared by every module."""


class OsqError(Exception):
    """Base class for simulator errors."""


class InvalidDimension(OsqError, ValueError):
    pass


class IndexOutOfRange(OsqError, IndexError):
    pass


class DimensionMismatch(OsqError, ValueError):
    pass


class ArityMismatch(OsqError, ValueError):
    pass


class InvalidTargets(OsqError, ValueError):
    pass


class NotUnitary(OsqError, ValueError):
    pass


class NotAntiHermitian(OsqError, ValueError):
    pass


class ZeroNorm(OsqError, ValueError):
    pass


class ResourceCapExceeded(OsqError, MemoryError):
    """Raised when a register would exceed the amplitude cap."""
