"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`SewingError`.
The CLI maps the three top-level families to exit codes.
"""


class SewingError(Exception):
    """Base class."""


class ParseError(SewingError):
    """Malformed input document."""


class CheckFailed(SewingError):
    """A verification did not pass."""


class InternalInvariantViolation(SewingError):
    """Something that should be impossible happened."""


# world sheets
class InvalidSignature(ParseError):
    pass


class SewingDataError(SewingError):
    pass


class UnknownBoundary(SewingDataError):
    pass


class DuplicateBoundary(SewingDataError):
    pass


class DirectionMismatch(SewingDataError):
    pass


class KindMismatch(SewingDataError):
    pass


# tensors
class ShapeMismatch(SewingError):
    pass


class DualityMismatch(SewingError):
    pass


class BadPermutation(SewingError):
    pass


# decompositions
class InvalidDecomposition(SewingError):
    pass


class TargetMismatch(SewingError):
    pass


# algebra
class NotASolution(CheckFailed):
    pass


class RelationsFail(CheckFailed):
    pass


class NotIdempotent(CheckFailed):
    pass


class NondegeneracyFailure(CheckFailed):
    pass


class NotFrobenius(CheckFailed):
    pass


class NotSymmetric(CheckFailed):
    pass


class NotCommutative(CheckFailed):
    pass


class CardyFail(CheckFailed):
    pass


# rewriting
class NoMatch(SewingError):
    pass


class InterfaceMismatch(SewingError):
    pass


class NotACylinder(SewingError):
    pass
