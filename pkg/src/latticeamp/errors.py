"""Exception types shared across the package."""


class LatticeAmpError(Exception):
    """Base class for all latticeamp errors."""


class RankDeficientError(LatticeAmpError):
    """Matrix does not have the full rank an operation requires."""


class InvalidDimensionError(LatticeAmpError):
    """Input dimensions outside an operation's domain."""


class DegenerateInputError(LatticeAmpError):
    """Structurally degenerate input (e.g. an all-zero row or column)."""


class IterationLimitError(LatticeAmpError):
    """An iterative routine exceeded its hard iteration budget."""


class DimensionTooLargeError(LatticeAmpError):
    """Problem size beyond the guard for an enumeration-backed routine."""


class RadiusTooSmallError(LatticeAmpError):
    """An explicit search radius excludes every lattice point."""


class NonFiniteError(LatticeAmpError):
    """A numeric state became NaN or infinite."""


class NoConvergenceError(LatticeAmpError):
    """A fixed-point iteration failed to converge within its step cap."""
