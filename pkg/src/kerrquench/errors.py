"""Exception types raised by numeric guards.

Invalid arguments raise plain ``ValueError``. A tripped guard (sector too
large, truncation tail too heavy, x-grid too coarse) raises a subclass of
``GuardError`` so callers such as the CLI can tell the two apart.
"""


class GuardError(Exception):
    """A numeric guard refused to run the computation."""

    guard = "guard"


class DimensionGuardError(GuardError):
    guard = "dimension"


class DimensionOverflowError(GuardError, OverflowError):
    guard = "dimension-overflow"


class TailToleranceError(GuardError):
    guard = "tail"


class AliasingError(GuardError):
    guard = "aliasing"
