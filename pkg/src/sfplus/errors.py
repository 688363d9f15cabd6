"""Exception types shared across the package.

Each maps to a distinct CLI exit code so scripted callers can tell a bad
config from a diverged run from an I/O problem.
"""


class SfplusError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigInvalid(SfplusError):
    """Raised when a config value violates a precondition (bad range, unknown
    preset, unparseable override)."""

    exit_code = 2


class Diverged(SfplusError):
    """Raised when iterates or losses become non-finite during a run."""

    exit_code = 3


class NonFiniteParameter(Diverged):
    """Raised when an optimizer update produces NaN/Inf entries."""


class DenominatorZero(SfplusError):
    """Raised when the step-size denominator (the gradient L1 EMA) is zero.

    Only possible when the very first gradient is identically zero; callers
    normally catch this, take a zero-length step, and warn.
    """

    exit_code = 1


class BatchTooLarge(ConfigInvalid):
    """Raised when a requested batch size exceeds the problem's sample pool."""


class OutputUnwritable(SfplusError):
    """Raised when an output path cannot be created or written."""

    exit_code = 4


class FitDiverged(SfplusError):
    """Raised when the curve fit cannot produce finite parameters.

    Carries the best grid-search solution (if any) as ``best`` so callers
    can fall back to it or report it alongside the failure.
    """

    exit_code = 1

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class MissingColumn(SfplusError):
    """Raised when a log file lacks a column an analysis step needs."""

    exit_code = 2
