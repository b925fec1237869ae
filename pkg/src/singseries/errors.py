"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line can map failures
to distinct process statuses without inspecting messages.
"""


class SingSeriesError(Exception):
    exit_code = 1


class ConfigurationError(SingSeriesError, ValueError):
    """Invalid or inconsistent parameters (cutoff too small, bad window geometry)."""

    exit_code = 3


class BoundsError(ConfigurationError):
    """An argument lies outside the supported numeric range."""


class DomainError(ConfigurationError):
    """The mathematical object is outside the operation's domain."""


class DegenerateInputError(DomainError):
    """Repeated tuple entries or similar degeneracy."""


class BudgetError(SingSeriesError, RuntimeError):
    """Estimated work exceeds the configured budget."""

    exit_code = 4


class CapabilityError(SingSeriesError, NotImplementedError):
    """The request is well-posed but outside what this package computes."""

    exit_code = 5
