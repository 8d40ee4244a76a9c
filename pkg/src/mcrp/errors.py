"""Exception hierarchy shared by every mcrp module."""


class McrpError(Exception):
    """Base class for all mcrp errors."""


class InvalidInputError(McrpError, ValueError):
    """An argument is outside the domain of an operation."""


class GridRangeError(McrpError, IndexError):
    """A time-step index lies outside the mission planning horizon."""


class InfeasibleTransferError(McrpError):
    """No phasing candidate keeps the transfer orbit above the surface."""


class UnsupportedTransferError(McrpError):
    """The transfer requires an altitude change, which is not modelled."""


class UndefinedBoundError(McrpError):
    """A slot-grid bound has no meaning for the given orbit (e.g. equatorial RAAN)."""


class InvalidPlanError(McrpError):
    """A reconfiguration plan does not fit the instance it is evaluated against."""


class SchemaError(McrpError, ValueError):
    """A serialized document does not follow the expected schema.

    ``path`` names the offending field, e.g. ``satellites/0/c_max_kms``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path or '<root>'}: {message}")
