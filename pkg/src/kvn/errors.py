"""Exception hierarchy.

Mathematical refusals (``NotExtendable``, ``NotRepresentable``) carry a
machine-readable witness; the CLI maps them to exit code 2.
"""


class KvnError(Exception):
    """Base class for all library errors."""

    def __init__(self, message="", witness=None):
        super().__init__(message)
        self.witness = witness


class DimensionError(KvnError, ValueError):
    pass


class InvalidInput(KvnError, ValueError):
    pass


class NotSymmetric(KvnError):
    pass


class NotPositive(KvnError):
    pass


class NotHermitian(KvnError):
    pass


class Refusal(KvnError):
    """A theorem-backed negative answer rather than a malformed input."""


class NotExtendable(Refusal):
    pass


class NotRepresentable(Refusal):
    pass


class BadCandidate(KvnError):
    pass


class RangeMismatch(KvnError):
    pass


class SpectralRadiusTooLarge(KvnError):
    pass


class ConvergenceError(KvnError):
    pass


class InvalidAlgebra(KvnError, ValueError):
    pass


class NotLeftUnit(KvnError):
    pass


class UnboundedNet(KvnError):
    pass


class NotCStarInstance(KvnError):
    pass


class BadIndicator(KvnError, ValueError):
    pass


class VerificationError(KvnError, AssertionError):
    """A built-in certificate failed; indicates a bug, not bad input."""
