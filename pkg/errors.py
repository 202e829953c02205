"""Exception hierarchy shared by the library and the command-line front end."""


class SupercharError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 2


class ParseError(SupercharError):
    """Text input does not follow the arc / node-set grammar."""

    exit_code = 1


class PreconditionError(SupercharError):
    """Inputs are well formed but violate an operation's precondition (e.g. K not inside L)."""

    exit_code = 2


class GuardExceededError(PreconditionError):
    """An enumeration would exceed the configured size guard."""


class SearchBoundExceeded(SupercharError):
    """A bounded search stopped before it could decide the question."""

    exit_code = 2


class VerificationError(SupercharError):
    """Two independent computations disagree, or an inline watchdog fired."""

    exit_code = 3
