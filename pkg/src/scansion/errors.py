"""Exception hierarchy shared across the toolkit.

Everything raised for bad input data derives from :class:`DataError`, which
the command line front end maps to exit status 2.
"""


class DataError(ValueError):
    """Input data violates a format or a precondition."""


class LengthMismatch(DataError):
    pass


class Misaligned(DataError):
    pass


class MissingLayer(DataError):
    pass
