"""Exception hierarchy.

InputError subclasses signal malformed or mathematically invalid input
(CLI exit code 1).  ResourceError subclasses signal that a configured
guard tripped before an answer was reached (CLI exit code 2); they are
never silently swallowed.
"""


class IwipError(Exception):
    """Base class for all package errors."""


class InputError(IwipError):
    """Invalid input: bad letters, non-automorphisms, empty data."""


class UnknownLetter(InputError):
    pass


class RankMismatch(InputError):
    pass


class UnknownGenerator(InputError):
    pass


class NotAnAutomorphism(InputError):
    pass


class EmptyGenerators(InputError):
    pass


class TrivialWord(InputError):
    pass


class RankTooSmall(InputError):
    pass


class EmptyGenSet(InputError):
    pass


class CyclicSubgroup(InputError):
    pass


class IncompatibleSpecs(InputError):
    pass


class ResourceError(IwipError):
    """A guard (candidate cap, search depth, node budget) was exceeded."""


class BudgetTooLarge(ResourceError):
    pass


class MarginExceeded(ResourceError):
    """A boundary-point search ran out of depth before stabilizing."""


class UnstableComputation(ResourceError):
    """Cross-checked quantities disagreed; results are not trustworthy."""
