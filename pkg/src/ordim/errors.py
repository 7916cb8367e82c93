"""Exception types shared across the package."""

from __future__ import annotations


class OrdimError(Exception):
    """Base class for all errors raised by ordim."""


class CycleDetected(OrdimError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"cover relation contains a cycle: {self.cycle}")


class DuplicateLabel(OrdimError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"duplicate label {label}")


class IdOutOfRange(OrdimError):
    def __init__(self, element, size):
        self.element = element
        self.size = size
        super().__init__(f"element id {element} outside ground set of size {size}")


class DuplicateElement(OrdimError):
    def __init__(self, element):
        self.element = element
        super().__init__(f"element {element} occurs twice in sequence")


class NotTotal(OrdimError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"sequence misses elements {self.missing}")


class SizeGuardExceeded(OrdimError):
    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"construction would have {size} elements (limit {limit})")


class MalformedCoreLabel(OrdimError):
    pass


class EmbeddingViolation(OrdimError):
    def __init__(self, pair, detail=""):
        self.pair = pair
        super().__init__(f"order embedding fails on pair {pair} {detail}".strip())


class EqualElements(OrdimError):
    pass


class PairNotIncomparable(OrdimError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"pair {pair} is not incomparable")


class ParseError(OrdimError):
    pass


class Overflow(OrdimError):
    """A Ramsey bound too large to materialize; ``expression`` holds it symbolically."""

    def __init__(self, expression):
        self.expression = expression
        super().__init__(f"bound too large to evaluate: {expression}")


class InvalidRealizer(OrdimError):
    """A ple family that is not even syntactically usable (bad ids, repeated
    elements, or an order violation inside one ple)."""
