"""Exception types shared across the workbench."""


class AfcError(Exception):
    """Base class for all workbench errors."""


class FieldError(AfcError):
    """Invalid field description (characteristic not 0 or prime)."""


class ShapeMismatch(AfcError):
    """Matrix shapes do not line up for the requested operation."""


class NotIdempotent(AfcError):
    """split_idempotent was handed a map with e@e != e."""


class ArityMismatch(AfcError):
    """Functor applied to the wrong number of arguments."""


class NotCommuting(AfcError):
    """normalize_signs was handed a grid whose squares do not commute."""


class InvalidSDR(AfcError):
    """Row-wise retraction data violates its defining identities."""


class RowNotContractible(AfcError):
    """A supplied row contraction fails ds + sd = 1."""


class NotStrictlyReduced(AfcError):
    """Degreewise application needs F(0) = 0 and F(zero map) = 0 exactly."""


class WindowExhausted(AfcError):
    """The requested construction needs degrees beyond the truncation cutoff."""


class WindowTooSmall(AfcError):
    """A homology claim would need a differential outside the stored window."""


class EmptyTrustedRange(AfcError):
    """Two complexes have no common trusted degrees to compare."""


class SlotOutOfRange(AfcError):
    """A variable-slot index does not exist on this functor."""


class InvalidProfile(AfcError):
    """Partition multiplicity profile violates sum(i * k_i) = n."""


class NotApplicable(AfcError):
    """The adjunction-unit splitting is undefined for this shape."""


class ParseError(AfcError):
    """Functor DSL text does not conform to the grammar."""

    def __init__(self, message: str, position: int = -1):
        super().__init__(message)
        self.position = position


class BudgetExceeded(AfcError):
    """A scenario overran its wall-clock budget and was stopped."""
