"""Exception hierarchy.

Every validation failure raised by the library derives from
:class:`SecrexpError`, itself a :class:`ValueError`, so callers that only care
about bad input can catch ``ValueError``.
"""


class SecrexpError(ValueError):
    """Base class for all library validation errors."""


class NegativeProbability(SecrexpError):
    pass


class RowSumViolation(SecrexpError):
    pass


class ShapeMismatch(SecrexpError):
    pass


class LengthMismatch(SecrexpError):
    pass


class IndexOutOfRange(SecrexpError):
    pass


class EncoderRowSumViolation(SecrexpError):
    pass


class DecoderDomainIncomplete(SecrexpError):
    pass


class EnumerationTooLarge(SecrexpError):
    pass


class InvalidRate(SecrexpError):
    pass


class ZeroMarginal(SecrexpError):
    pass


class InvalidTheta(SecrexpError):
    pass


class InvalidEta(SecrexpError):
    pass


class InvalidDelta(SecrexpError):
    pass


class RateMismatch(SecrexpError):
    pass


class NoFeasibleTheta(SecrexpError):
    pass
