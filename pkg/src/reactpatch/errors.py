"""Exception hierarchy shared by every module.

The CLI maps ``ConfigError`` to exit status 2 and every ``NumericalError``
subclass to exit status 3.
"""


class ReactPatchError(Exception):
    """Base class for all package errors."""


class ConfigError(ReactPatchError, ValueError):
    """Invalid user input: bad ranges, malformed layouts, unknown options."""


class DomainError(ConfigError):
    """Argument outside the mathematical domain of a special function."""


class SeparationError(ConfigError):
    """Two patch centers are closer than the well-separated threshold."""


class NumericalError(ReactPatchError, ArithmeticError):
    """A computation could not be completed to the requested accuracy."""


class PoleError(NumericalError):
    """Reactivity lies on (or within tolerance of) a pole -mu_k of C(kappa)."""


class BracketError(NumericalError):
    """A root could not be bracketed inside the requested interval."""


class ConvergenceError(NumericalError):
    """An eigen-solve or iteration failed to deliver usable results."""


class ValidityError(NumericalError):
    """An asymptotic formula was evaluated outside the range where it holds."""
