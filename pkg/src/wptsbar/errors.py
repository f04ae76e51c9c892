"""Exception hierarchy.

Exit-code mapping used by the CLI: ValidationError -> 1,
ToleranceError -> 2, DivergenceError -> 3.
"""


class WptsbarError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(WptsbarError):
    """Bad configuration or arguments: out-of-range parameter, malformed
    config file, command sequence that does not cover the run."""


class ToleranceError(WptsbarError):
    """A reproduction run finished but missed its acceptance tolerance."""


class DivergenceError(WptsbarError):
    """The integrator produced a non-finite or absurdly large state."""
