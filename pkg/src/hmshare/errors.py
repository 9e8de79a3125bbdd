"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Inputs violate a documented precondition."""


class NotInvertible(ParameterError):
    pass


class InvalidGroupOrder(ParameterError):
    """The supplied group order does not annihilate the element."""


class GenerationFailed(RuntimeError):
    """A randomized search ran out of its attempt budget.

    Retrying with fresh randomness is the expected recovery.
    """


class DecodeError(ValueError):
    pass


class DuplicateShare(ValueError):
    pass


class SessionAborted(RuntimeError):
    pass
