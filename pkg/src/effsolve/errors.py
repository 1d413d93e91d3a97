"""Exception hierarchy shared by all effsolve modules."""


class EffsolveError(Exception):
    """Base class for every error raised by this package."""


class DuplicateId(EffsolveError, KeyError):
    pass


class UnknownConcept(EffsolveError, LookupError):
    pass


class SelfLoop(EffsolveError, ValueError):
    pass


class NonPositiveCost(EffsolveError, ValueError):
    pass


class TooManyCandidates(EffsolveError, ValueError):
    pass


class TooLarge(EffsolveError, ValueError):
    """A CSP instance is too big to enumerate blindly."""


class DepthExceeded(EffsolveError, RuntimeError):
    pass


class BudgetExhausted(EffsolveError, RuntimeError):
    pass
