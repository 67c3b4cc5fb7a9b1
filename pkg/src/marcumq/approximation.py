r"""Exponential-type approximation of the first-order Marcum Q-function.

At fixed ``a`` the approximation is

.. math::

    \tilde Q_1(a, b) = \exp\left(-e^{\nu} b^{\mu}\right),

so it is fully described by the pair ``(nu, mu)``. The pair can come from the
closed-form fourth-order expansion around ``a = 0``, from a per-``a`` fit
(see :mod:`marcumq.calibration`), or from polynomials in ``a``.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate

from .errors import ConvergenceError, DomainError, PreconditionError
from .special import marcum_q1

EULER_GAMMA = 0.57721566490153286061

# Tail level below which both Q1 and its approximation count as negligible.
TAIL_LEVEL = 1e-12


@dataclass(frozen=True)
class ApproxParams:
    """Exponent offset ``nu`` and exponent power ``mu`` at one value of ``a``."""

    nu: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "mu", float(self.mu))
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise DomainError(f"mu must be finite and positive, got {self.mu!r}")
        try:
            scale = math.exp(self.nu)
        except OverflowError:
            scale = math.inf
        if not (math.isfinite(self.nu) and 0.0 < scale < math.inf):
            raise DomainError(f"exp(nu) must be finite and positive, got nu={self.nu!r}")

    @property
    def scale(self):
        """``exp(nu)``, the multiplier of ``b**mu``."""
        return math.exp(self.nu)


@dataclass(frozen=True)
class PolyCoeffs:
    """Polynomial in ``a`` with coefficients in ascending order."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if not c:
            raise DomainError("a polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, a):
        # numpy's polyval is Horner's scheme on ascending coefficients
        return npoly.polyval(a, self.coeffs)


# Tabulated optimum (a, nu, mu) for delta=1e-4, b_max=12.
REFERENCE_TABLE = (
    (1.0, -1.1739, 2.0921),
    (2.0, -2.5492, 2.7094),
    (3.0, -4.6291, 3.6888),
    (4.0, -7.1668, 4.7779),
    (5.0, -10.0339, 5.9074),
    (6.0, -13.2014, 7.0794),
)

# Published degree-4 regression polynomials for mu(a) and nu(a).
PUBLISHED_MU_POLY = PolyCoeffs((2.174, -0.592, 0.593, -0.092, 0.005))
PUBLISHED_NU_POLY = PolyCoeffs((-0.840, 0.327, -0.740, 0.083, -0.004))


def table_params(a):
    """Tabulated ``ApproxParams`` for an integer ``a`` in 1..6."""
    for row_a, nu, mu in REFERENCE_TABLE:
        if row_a == a:
            return ApproxParams(nu, mu)
    raise KeyError(f"no tabulated parameters for a={a!r}")


def _check_a(a):
    a = float(a)
    if not a >= 0:
        raise DomainError(f"a must be nonnegative, got {a!r}")
    return a


def q_tilde(params, b):
    """Evaluate ``exp(-exp(nu) * b**mu)``; exactly 1 at ``b = 0``."""
    b_arr = np.asarray(b, dtype=float)
    if np.any(np.isnan(b_arr)) or np.any(b_arr < 0):
        raise DomainError(f"b must be nonnegative, got {b!r}")
    out = np.exp(-params.scale * b_arr ** params.mu)
    return float(out) if out.ndim == 0 else out


def analytic_params_small_a(a):
    """Closed-form fourth-order parameters, accurate for ``a << 1``.

    ``mu(a) = 2 + 9 a^4 / (8 (9 pi^2 - 80))`` and
    ``nu(a) = -ln 2 - a^2/2 + (45 pi^2 + 72 ln 2 + 36 C - 496) a^4 / (64 (9 pi^2 - 80))``
    with ``C`` the Euler-Mascheroni constant. At ``a = 0`` this is exactly
    ``(-ln 2, 2)``.
    """
    a = _check_a(a)
    denom = 9.0 * math.pi ** 2 - 80.0
    a2 = a * a
    a4 = a2 * a2
    mu = 2.0 + 9.0 * a4 / (8.0 * denom)
    nu_quartic = (45.0 * math.pi ** 2 + 72.0 * math.log(2.0) + 36.0 * EULER_GAMMA - 496.0) / (64.0 * denom)
    nu = -math.log(2.0) - 0.5 * a2 + nu_quartic * a4
    return ApproxParams(nu=nu, mu=mu)


def eval_poly_params(mu_poly, nu_poly, a):
    """Evaluate ``mu(a)`` and ``nu(a)`` polynomials at ``a``."""
    a = _check_a(a)
    return ApproxParams(nu=float(nu_poly(a)), mu=float(mu_poly(a)))


def published_poly_params(a):
    """Parameters from the published degree-4 polynomials."""
    return eval_poly_params(PUBLISHED_MU_POLY, PUBLISHED_NU_POLY, a)


def continuous_error(a, params, b_max=12.0, tol=1e-14):
    """Integrated squared error ``int_0^b_max (Q1 - Q~)^2 db``.

    Truncates the integral over ``[0, inf)`` at ``b_max``; both functions must
    already be below ``TAIL_LEVEL`` there.

    Raises
    ------
    PreconditionError
        If either function is not negligible at ``b_max``.
    ConvergenceError
        If the quadrature cannot certify ``tol``.
    """
    a = _check_a(a)
    if not b_max > 0:
        raise DomainError(f"b_max must be positive, got {b_max!r}")
    q_end = marcum_q1(a, b_max)
    qt_end = q_tilde(params, b_max)
    if q_end >= TAIL_LEVEL or qt_end >= TAIL_LEVEL:
        raise PreconditionError(
            f"tail not negligible at b_max={b_max}: Q1={q_end:.3g}, approx={qt_end:.3g}")

    def integrand(b):
        return (marcum_q1(a, b) - q_tilde(params, b)) ** 2

    value, abserr, info = integrate.quad(
        integrand, 0.0, b_max, epsabs=tol, epsrel=0.0, limit=1000, full_output=1)[:3]
    if abserr > tol:
        raise ConvergenceError(f"continuous error quadrature reached {abserr:.3g} > {tol:.3g}")
    return max(value, 0.0)


def b_grid(delta, b_max):
    """Sample points ``delta * beta`` for ``beta = 0 .. floor(b_max / delta)``."""
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    if not b_max > 0:
        raise DomainError(f"b_max must be positive, got {b_max!r}")
    # guard against 12 / 1e-3 landing a hair below an integer
    n = int(math.floor(b_max / delta + 1e-9))
    return delta * np.arange(n + 1)


class DiscreteErrorObjective:
    """Riemann-sum error at fixed ``a`` with the Q1 column cached.

    Q1 does not depend on ``(nu, mu)``, so an optimizer can evaluate this
    repeatedly at the cost of one ``exp`` and one ``pow`` per grid point.
    The ``b = 0`` term is always zero (both functions equal 1) and is dropped.
    """

    def __init__(self, a, delta=1e-4, b_max=12.0):
        self.a = _check_a(a)
        self.delta = float(delta)
        self.b_max = float(b_max)
        b = b_grid(self.delta, self.b_max)[1:]
        self.b = b
        self.log_b = np.log(b)
        self.q1 = marcum_q1(self.a, b)

    def residuals(self, nu, mu):
        return self.q1 - np.exp(-math.exp(nu) * np.exp(mu * self.log_b))

    def __call__(self, nu, mu):
        r = self.residuals(nu, mu)
        return self.delta * float(np.dot(r, r))

    def residuals_and_jacobian(self, nu, mu):
        """Residuals and their derivatives with respect to ``(nu, mu)``."""
        scaled = math.exp(nu) * np.exp(mu * self.log_b)
        approx = np.exp(-scaled)
        r = self.q1 - approx
        d_nu = scaled * approx
        jac = np.column_stack((d_nu, d_nu * self.log_b))
        return r, jac

    def gradient(self, nu, mu):
        r, jac = self.residuals_and_jacobian(nu, mu)
        return 2.0 * self.delta * (jac.T @ r)


def discrete_error(a, params, delta=1e-4, b_max=12.0):
    """``delta * sum_beta (Q1(a, delta beta) - Q~(a, delta beta))^2`` up to ``b_max``."""
    return DiscreteErrorObjective(a, delta, b_max)(params.nu, params.mu)
