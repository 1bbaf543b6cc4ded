"""Exception and warning types."""


class MetarepError(Exception):
    pass


class RankDeficient(MetarepError, ValueError):
    pass


class NotSymmetric(MetarepError, ValueError):
    pass


class DimensionMismatch(MetarepError, ValueError):
    pass


class InvalidDims(MetarepError, ValueError):
    pass


class IndexOutOfRange(MetarepError, IndexError):
    pass


class DegenerateTasks(MetarepError, ValueError):
    """Task diversity is zero, so the representation is not identifiable."""


class LineSearchFailure(MetarepError, RuntimeError):
    pass


class ConfigError(MetarepError, ValueError):
    """Invalid experiment configuration.

    ``key`` names the offending field and ``line`` the 1-based line number in
    the config file, when known.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class SpectralGapWarning(UserWarning):
    """The r-th and (r+1)-th eigenvalues coincide; the subspace is not unique."""
