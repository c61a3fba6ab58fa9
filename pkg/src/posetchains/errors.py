"""Exception types raised across the package."""


class PosetChainError(Exception):
    """Base class for all errors raised by posetchains."""


class GradingViolation(PosetChainError):
    pass


class EmptyLevel(PosetChainError):
    pass


class DuplicateLabel(PosetChainError):
    pass


class UnknownElement(PosetChainError, KeyError):
    pass


class UnknownFixture(PosetChainError):
    pass


class BoundaryLevel(PosetChainError):
    """A rule was applied at a level with no neighbour in its direction."""


class LevelMismatch(PosetChainError):
    pass


class NotAUSequence(PosetChainError):
    pass


class ZeroWeightError(PosetChainError, ZeroDivisionError):
    """A cover u < v has zero mass at u but positive mass at v.

    No down rule can then reproduce the sequence, since it would need
    D(v -> u) = 0 on a cover.
    """


class Reducible(PosetChainError):
    def __init__(self, classes):
        self.classes = classes
        super().__init__(f"UD chain has {len(classes)} closed classes: {classes}")


class CapExceeded(PosetChainError):
    pass


class NoSuchRowLength(PosetChainError):
    pass


class EmptyPartition(PosetChainError):
    pass


class BadMu(PosetChainError, ValueError):
    pass


class ZeroComponent(PosetChainError, ValueError):
    pass


class BadSchedule(PosetChainError, ValueError):
    pass
