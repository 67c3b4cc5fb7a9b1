"""Exception types shared across the package."""

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class PreconditionError(ValueError):
    """A runtime-checked precondition (e.g. a negligible tail) does not hold."""


class ConvergenceError(RuntimeError):
    """An iterative or adaptive procedure could not reach the requested tolerance."""


class RankDeficiencyError(np.linalg.LinAlgError):
    """A least-squares design matrix does not have full column rank."""
