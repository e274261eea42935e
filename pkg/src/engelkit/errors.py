"""Exception hierarchy shared across the package."""


class EngelKitError(Exception):
    pass


class PresentationError(EngelKitError):
    """Malformed or inconsistent polycyclic presentation."""


class CollectionBudgetExceeded(EngelKitError):
    pass


class BudgetExhausted(EngelKitError):
    """A search ran out of its step or memory budget without an answer."""


class PresentationMismatch(EngelKitError):
    pass


class InfiniteGroupError(EngelKitError):
    pass


class ProtocolError(EngelKitError):
    pass


class WireError(EngelKitError):
    pass
