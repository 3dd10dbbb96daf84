"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, InputDataError
(and subclasses) -> 3, InvariantError -> 4.
"""


class SitenetError(Exception):
    """Base class for all package errors."""


class ConfigError(SitenetError):
    """Bad or inconsistent run configuration."""


class InputDataError(SitenetError):
    """Input files or values violate a documented contract."""


class GridParseError(InputDataError):
    """Malformed grid header; message names the offending key."""


class GridTruncationError(InputDataError):
    """Grid body does not hold the declared number of cells."""


class GeometryError(InputDataError):
    """Degenerate or inconsistent polygon geometry."""


class FrictionTableError(InputDataError):
    """Friction table incomplete or violating its invariants."""


class InvariantError(SitenetError):
    """A computed result failed an internal consistency check."""
