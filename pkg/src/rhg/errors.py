"""Exception types raised by the library.

Every error below derives from RhgError so callers can catch the whole
family with one clause.  The names track the failure modes of the numerical
contracts: grid mismatches, off-lattice shifts, quadrature truncation, and
invalid parameter ranges.
"""


class RhgError(Exception):
    pass


# algebra
class Unrealizable(RhgError):
    """No anticommuting orthogonal family of the requested size exists here."""


class ZeroLambda(RhgError):
    pass


class DimensionMismatch(RhgError):
    pass


class OffLattice(RhgError):
    """A translation shift does not land on the sample lattice."""


# fields
class AxisKindMismatch(RhgError):
    pass


class GridMismatch(RhgError):
    pass


class IoFailure(RhgError):
    pass


# representations / transforms
class SupportOverflow(RhgError):
    """An operation pushed numerically significant mass to the grid boundary."""


class TruncationTooSmall(RhgError):
    pass


class InterpolationOverflow(RhgError):
    """A resampling target exited the resolvable (Nyquist) frequency box."""


class KernelTooLarge(RhgError):
    pass


# parameter ranges
class NegativeDegree(RhgError):
    pass


class BadOrder(RhgError):
    pass


class BadExponent(RhgError):
    pass


class BadAlpha(RhgError):
    pass


class BadRange(RhgError):
    pass


class OutOfWindow(RhgError):
    pass


class ZeroC(RhgError):
    pass


# cli
class UnknownSuite(RhgError):
    pass


class ConfigInvalid(RhgError):
    pass
