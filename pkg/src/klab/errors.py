"""Exception hierarchy shared by every klab module."""


class KlabError(Exception):
    """Base class for all klab errors."""


class NotInvertible(KlabError, ValueError):
    """Raised when an element has no inverse modulo the given modulus."""


class BadParameters(KlabError, ValueError):
    """Raised when arguments violate an operation's preconditions."""


class BudgetExceeded(KlabError, RuntimeError):
    """Raised when a request exceeds the enumeration budget of a counter."""


class WitnessViolation(KlabError, AssertionError):
    """Raised when solutions in a degenerate lattice class disagree on their rational value."""
