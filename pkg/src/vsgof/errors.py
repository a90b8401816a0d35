"""Exception hierarchy shared across the package.

Every error raised by the library derives from :class:`VsgofError`, so
callers (and the CLI) can map failure classes to stable exit codes.
"""

from __future__ import annotations

__all__ = [
    "VsgofError",
    "DataError",
    "ParameterError",
    "ConstraintError",
    "TiesError",
    "EstimationError",
    "CapabilityError",
]


class VsgofError(Exception):
    """Base class for all errors raised by this package."""


class DataError(VsgofError):
    """Input data is unusable: wrong shape, non-finite values, support
    violations, unparseable input files, or samples too small to process."""


class ParameterError(VsgofError):
    """Invalid distribution parameters or test options (wrong arity, values
    outside the parameter space, contradictory flags)."""


class ConstraintError(VsgofError):
    """The spacing entropy estimate exceeds the empirical null bound for
    every candidate window.

    This typically means the sample is very small, or the data are unlikely
    to come from the null family; widening the window range (``extend``) or
    dropping the constraint (``relax``) are the available escapes.
    """


class TiesError(VsgofError):
    """Tied observations are too dense: no candidate window produces strictly
    positive spacings, so the spacing entropy estimate does not exist."""


class EstimationError(VsgofError):
    """A numerical estimation step failed: MLE non-convergence, degenerate
    data (zero spread), or a Monte-Carlo run in which every replicate had to
    be discarded."""


class CapabilityError(VsgofError):
    """The requested quantity is not available for this family (for example a
    closed-form entropy where none is implemented)."""
