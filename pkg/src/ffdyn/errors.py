"""Exception hierarchy shared by the library and the command-line driver."""


class FfdynError(Exception):
    """Base class for all library errors."""


class InputError(FfdynError, ValueError):
    """Malformed or out-of-range user input (bad literal, bad degree, ...)."""


class WorkCapExceeded(FfdynError):
    """A computation would exceed its configured work or size budget."""


class InvariantViolation(FfdynError, AssertionError):
    """An internal identity that must always hold was found broken."""
