"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`WarpflowError`,
and most of them are also ``ValueError`` so callers that only care about bad
input can catch the builtin.
"""


class WarpflowError(Exception):
    pass


# -- ingest -----------------------------------------------------------------


class IngestError(WarpflowError, ValueError):
    """Raised for malformed input tables.  ``row`` is the 1-based line number."""

    def __init__(self, message, path=None, row=None):
        self.path = path
        self.row = row
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"line {row}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class MissingColumn(IngestError):
    pass


class DuplicateRegion(IngestError):
    pass


class NonPositivePopulation(IngestError):
    pass


class InvalidValue(IngestError):
    pass


class UnknownRegion(IngestError):
    pass


class NegativeCount(IngestError):
    pass


class DevicesExceedTotal(IngestError):
    pass


class BadDate(IngestError):
    pass


class MissingDates(IngestError):
    def __init__(self, message, path=None, row=None, dates=()):
        self.dates = tuple(dates)
        super().__init__(message, path=path, row=row)


class DuplicateDate(IngestError):
    pass


class NegativeCases(IngestError):
    pass


# -- numerics ---------------------------------------------------------------


class ZeroDevices(WarpflowError, ValueError):
    pass


class WindowTooLarge(WarpflowError, ValueError):
    pass


class LagTooLarge(WarpflowError, ValueError):
    pass


class DegenerateSeries(WarpflowError, ValueError):
    """A series with zero range; ``which`` names the side when known."""

    def __init__(self, message, which=None):
        self.which = which
        super().__init__(message)


class EmptySeries(WarpflowError, ValueError):
    pass


class InfeasibleBand(WarpflowError, ValueError):
    pass


class TooLarge(WarpflowError, ValueError):
    pass


class ZeroVariance(WarpflowError, ValueError):
    pass


class ZeroSpread(WarpflowError, ValueError):
    pass


class EmptyAfterFilter(WarpflowError):
    pass


# -- configuration ----------------------------------------------------------


class ConfigError(WarpflowError, ValueError):
    pass


class UnknownKey(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass
