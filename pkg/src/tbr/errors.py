"""Exception types shared across the package.

The CLI maps SchemaError/usage problems to exit code 2 and every other
TbrError to exit code 1.
"""


class TbrError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(TbrError):
    """Input table is missing required columns or is otherwise malformed."""

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = tuple(missing)


class RosterError(TbrError):
    """Roster file is invalid (non-bijective, bad ids, unknown format)."""


class UnknownEventError(TbrError):
    """Event code is not in the configured vocabulary."""


class NotBattedBallError(TbrError):
    """Event code is valid but does not describe a batted ball in play."""


class EmptyCellError(TbrError):
    """A ball landed in a baseline cell with no observations (policy=abort)."""

    def __init__(self, message, cell):
        super().__init__(message)
        self.cell = cell


class IdentifiabilityError(TbrError):
    """The park-team incidence graph is disconnected; effects are not jointly
    identifiable.  ``components`` holds (parks, teams) tuples of frozensets."""

    def __init__(self, message, components):
        super().__init__(message)
        self.components = components


class UnderdeterminedError(TbrError):
    """Fewer observations than model parameters."""


class IncompleteRosterError(TbrError):
    """An estimate does not cover every entity it claims to cover."""


class DegenerateDistributionError(TbrError):
    """Effects have zero spread; z-scores are undefined."""
