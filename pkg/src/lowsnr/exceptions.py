"""Exception hierarchy for lowsnr.

Two broad families matter for the CLI exit-code contract: schema errors
(malformed input files, exit 2) and numeric/module errors (exit 3).
Plain ``ValueError`` is used for ordinary invalid arguments.
"""


class LowSNRError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(LowSNRError, ValueError):
    """An input file does not match its JSON schema.

    The message is path-qualified, e.g. ``mixture.weights: must sum to 1``.
    """


class DegenerateMixtureError(LowSNRError, ValueError):
    """All centers coincide, so the normalization scale is undefined."""


class PreconditionError(LowSNRError, ValueError):
    """A documented operation precondition does not hold for the inputs."""


class UnsupportedMethodError(LowSNRError, ValueError):
    """The requested evaluation method is not available for these inputs."""


class ResourceLimitError(LowSNRError, ValueError):
    """A guard against factorial/exponential blowup was exceeded."""


class NumericalDegeneracyError(LowSNRError, ArithmeticError):
    """An intermediate quantity underflowed past the point of usability."""


class NotFoundError(LowSNRError, RuntimeError):
    """A search (e.g. Newton multistart) exhausted its budget."""


class DegenerateSolutionError(LowSNRError, RuntimeError):
    """A solver converged, but to a solution with collided values."""


class OnVarietyError(LowSNRError, ValueError):
    """The point lies on the next moment variety; its type is undefined."""


class NotACriticalPointError(LowSNRError, ValueError):
    """The stationarity residual is too large for classification."""
