"""Exponential-type approximation of the first-order Marcum Q-function.

Reference evaluators, the approximation and its calibration, and the
Rician-fading connectivity integral it was built for.
"""

__version__ = "0.1.0"

from .approximation import (
    PUBLISHED_MU_POLY,
    PUBLISHED_NU_POLY,
    REFERENCE_TABLE,
    ApproxParams,
    PolyCoeffs,
    analytic_params_small_a,
    continuous_error,
    discrete_error,
    eval_poly_params,
    published_poly_params,
    q_tilde,
)
from .calibration import FitConfig, FitResult, RegressionResult, fit_grid, fit_single, regress_poly
from .connectivity import (
    Scenario,
    connection_mass_closed_form,
    connection_mass_numeric,
    pair_connectivity,
    rician_power_ccdf,
)
from .errors import ConvergenceError, DomainError, PreconditionError, RankDeficiencyError
from .special import (
    bessel_i,
    lower_incomplete_gamma,
    marcum_q1,
    marcum_q1_quadrature,
    upper_incomplete_gamma,
)
