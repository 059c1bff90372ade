"""Exception hierarchy shared by all modules."""


class OscillatorError(Exception):
    """Base class for errors raised by this package."""


class DomainError(OscillatorError, ValueError):
    """An argument lies outside the region where a formula is defined."""


class ConvergenceError(OscillatorError, RuntimeError):
    """A quadrature did not reach the requested tolerance."""


class NoBracketError(OscillatorError, ValueError):
    """A root bracket has equal signs at both ends."""


class NoRootError(OscillatorError, LookupError):
    """A searched-for feature does not exist for the given parameters."""
