"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError and its
subclasses -> 3, anything else (including InvariantError) -> 4.
"""


class FlowTrackError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FlowTrackError):
    """A point fell outside the valid sampling domain of a grid."""


class ConfigError(FlowTrackError):
    """Invalid or unparseable run configuration."""


class DataError(FlowTrackError):
    """Missing, truncated, or malformed input data."""


class FlowFileError(DataError):
    """Malformed dense-flow file; message names the offending field."""


class DegenerateHomographyError(FlowTrackError):
    """Homography whose third row vanishes somewhere inside the image."""


class ConvergenceError(FlowTrackError):
    """Iterative undistortion failed to converge; carries the residual."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class FrameError(DataError):
    """A frame could not be processed; tracker state is left unchanged."""


class InvariantError(FlowTrackError):
    """An internal invariant was violated (a bug, not bad input)."""
