"""Exception hierarchy shared by all sparseline modules."""


class SparselineError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatch(SparselineError):
    """Operands have incompatible shapes."""


class CharacterOutOfRange(SparselineError):
    """A character has no single-byte (Latin-1) code."""


class LengthNotMultipleOfEight(SparselineError):
    """A bit vector cannot be split into whole bytes."""


class NotSymmetric(SparselineError):
    """A matrix required to be symmetric is not."""


class ConvergenceFailure(SparselineError):
    """An iterative numerical routine failed to converge."""


class RankDeficient(SparselineError):
    """A matrix required to have full column rank does not."""


class InvalidParameter(SparselineError):
    """A scalar parameter is outside its valid range."""


class NoSparseSolution(SparselineError):
    """Support enumeration found no solution within the size budget."""


class DegenerateSample(SparselineError):
    """Random sampling produced a degenerate draw, even after retries."""


class LpFailed(SparselineError):
    """A linear program that must be solvable returned a non-optimal status."""


class MessageLengthMismatch(SparselineError):
    """Message bit length does not match the encoder's input dimension."""


class CorruptKey(SparselineError):
    """A key file is truncated or fails its checksum."""


class InvariantViolation(SparselineError):
    """Stored data violates the invariants it was saved with."""


class InsufficientData(SparselineError):
    """Not enough data points to produce the requested output."""
