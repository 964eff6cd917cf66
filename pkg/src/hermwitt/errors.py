"""Exception hierarchy shared by all modules."""


class HermwittError(Exception):
    """Base class for all library errors."""


class InvalidSpec(HermwittError):
    pass


class InvalidModulus(InvalidSpec):
    pass


class NotAUnit(HermwittError):
    pass


class RingMismatch(HermwittError):
    pass


class NotIdempotent(HermwittError):
    pass


class NotEnumerable(HermwittError):
    pass


class InvalidEpsilon(HermwittError):
    pass


class InvalidArity(HermwittError):
    pass


class NonFreeCentralizer(HermwittError):
    pass


class Unsupported(HermwittError):
    pass


class InvalidEntry(HermwittError):
    pass


class FormMismatch(HermwittError):
    pass


class InvalidIdempotent(HermwittError):
    pass


class NotUnimodular(HermwittError):
    pass


class InvalidWitness(HermwittError):
    pass


class NotDiagonalizable(HermwittError):
    pass


class InvalidRank(HermwittError):
    pass


class InvalidOctagonData(HermwittError):
    pass


class Inconclusive(HermwittError):
    """A bounded search ended without a verdict.  Never silently converted
    into a negative answer."""


class CapExceeded(HermwittError):
    pass


class HomMismatch(HermwittError):
    pass


class HypothesisViolated(HermwittError):
    pass


class InternalInconsistency(HermwittError):
    """A verified mathematical property failed; this is always a bug or a
    wrong input, never a legitimate runtime outcome."""
