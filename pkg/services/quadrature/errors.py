"""Exceptions raised by the quadrature services."""


class QuadratureError(Exception):
    """Base class for every failure reported by the quadrature services"""


class InvalidParameter(QuadratureError, ValueError):
    """Degree or family parameters outside their admissible range"""


class Overflow(QuadratureError, OverflowError):
    """A requested output is not representable in double precision"""


class NotComputable(QuadratureError):
    """Parameters lie outside the region a backend has been validated for"""


class NaNInput(QuadratureError, ValueError):
    """A NaN reached a routine that has no meaningful answer for it"""


class NonOscillatory(QuadratureError):
    """The normal-form coefficient is not positive where zeros are sought"""


class StalledIteration(QuadratureError):
    """A fixed-point iteration hit its hard cap without contracting"""


class StepTooLarge(QuadratureError):
    """A Taylor step did not converge within the configured degree"""


class DeltaTooLarge(QuadratureError):
    """A shifted or near-zero expansion was asked for a shift beyond its range"""


class NotConverged(QuadratureError):
    """A special-function evaluation failed its internal accuracy check"""


class NoConvergence(QuadratureError):
    """The extended-precision eigensolver hit its iteration cap"""


class LengthMismatch(QuadratureError, ValueError):
    """Two rules being compared do not have matching node sets"""


class NegativeWeight(QuadratureError, ValueError):
    """A rule handed to the barycentric routine carries a non-positive weight"""


class ValidationFailure(QuadratureError):
    """A computed rule failed an accuracy gate against the reference"""
