r"""Pair connectivity under Rician fading and its radial "connection mass".

With path-loss exponent two, two nodes at distance ``r`` are connected with
probability ``H(r) = Q1(sqrt(2K), r alpha)``. Averaging over a homogeneous
configuration needs ``int_{r1}^{r2} r H(r) dr``. With the exponential
approximation this has the closed form

.. math::

    \frac{1}{\mu}\lambda^{-2/\mu}
    \left[\gamma(2/\mu, \lambda r_2^\mu) - \gamma(2/\mu, \lambda r_1^\mu)\right],
    \qquad \lambda = e^\nu \alpha^\mu .
"""

import json
import math
from dataclasses import asdict, dataclass

from scipy import integrate

from .approximation import ApproxParams, PUBLISHED_MU_POLY, PUBLISHED_NU_POLY, eval_poly_params, q_tilde
from .errors import ConvergenceError, DomainError
from .special import lower_incomplete_gamma, marcum_q1, upper_incomplete_gamma

EXACT = "exact"
APPROX = "approx"
POLY = "poly"


@dataclass(frozen=True)
class Scenario:
    """Connectivity problem: Rice factor, distance scale and distance range.

    ``alpha`` has units of inverse distance. ``omega`` only enters the power
    CCDF; the connectivity example folds it into ``alpha``.
    """

    K: float
    alpha: float
    r1: float
    r2: float
    omega: float = 1.0

    def __post_init__(self):
        for name in ("K", "alpha", "r1", "r2", "omega"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.K <= 0:
            raise DomainError(f"K must be positive, got {self.K}")
        if self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.omega <= 0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if self.r1 < 0:
            raise DomainError(f"r1 must be nonnegative, got {self.r1}")
        if not self.r1 < self.r2:
            raise DomainError(f"need r1 < r2, got r1={self.r1}, r2={self.r2}")

    @property
    def a(self):
        return math.sqrt(2.0 * self.K)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise DomainError("scenario must be a JSON object")
        unknown = set(data) - {"K", "alpha", "r1", "r2", "omega"}
        if unknown:
            raise DomainError(f"unknown scenario keys {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise DomainError(f"bad scenario: {exc}") from None

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def to_dict(self):
        return asdict(self)


def rician_power_ccdf(K, omega, x):
    """``P(|h|^2 > x)`` for Rician power: ``Q1(sqrt(2K), sqrt(2 (K+1) x / omega))``."""
    if not K > 0:
        raise DomainError(f"K must be positive, got {K!r}")
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    if not x >= 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    return marcum_q1(math.sqrt(2.0 * K), math.sqrt(2.0 * (K + 1.0) * x / omega))


def resolve_params(K, method, params=None, polys=None):
    """Approximation parameters at ``a = sqrt(2K)`` for a non-exact method.

    ``approx`` uses ``params`` if given, otherwise fits them. ``poly`` uses
    ``polys = (mu_poly, nu_poly)``, defaulting to the published polynomials.
    """
    a = math.sqrt(2.0 * K)
    if method == APPROX:
        if params is not None:
            return params
        from .calibration import fit_single
        return fit_single(a).params
    if method == POLY:
        mu_poly, nu_poly = polys if polys is not None else (PUBLISHED_MU_POLY, PUBLISHED_NU_POLY)
        return eval_poly_params(mu_poly, nu_poly, a)
    raise DomainError(f"unknown method {method!r}")


def pair_connectivity(K, alpha, r, method=EXACT, params=None, polys=None):
    """Connection probability ``H(r)`` of two nodes at distance ``r``."""
    if not K > 0:
        raise DomainError(f"K must be positive, got {K!r}")
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if not r >= 0:
        raise DomainError(f"r must be nonnegative, got {r!r}")
    if method == EXACT:
        return marcum_q1(math.sqrt(2.0 * K), r * alpha)
    return q_tilde(resolve_params(K, method, params, polys), r * alpha)


def connection_mass_closed_form(scenario, params):
    """Closed-form ``int_{r1}^{r2} r exp(-e^nu (r alpha)^mu) dr``.

    The bracket is taken from the upper incomplete gamma when both limits sit
    in the tail (``lambda r1^mu > 2/mu``), where the lower form would cancel.
    """
    if not isinstance(params, ApproxParams):
        raise DomainError("params must be ApproxParams")
    mu = params.mu
    s = 2.0 / mu
    lam = params.scale * scenario.alpha ** mu
    x1 = lam * scenario.r1 ** mu
    x2 = lam * scenario.r2 ** mu
    if x1 > s:
        bracket = upper_incomplete_gamma(s, x1) - upper_incomplete_gamma(s, x2)
    else:
        bracket = lower_incomplete_gamma(s, x2) - lower_incomplete_gamma(s, x1)
    return max(bracket, 0.0) * lam ** (-s) / mu


def connection_mass_numeric(scenario, integrand=EXACT, params=None, tol=1e-10):
    """Adaptive quadrature of ``int_{r1}^{r2} r H(r) dr``.

    ``integrand`` is ``"exact"`` (reference Q1) or ``"approx"`` (needs ``params``).
    """
    if integrand == EXACT:
        a = scenario.a

        def f(r):
            return r * marcum_q1(a, r * scenario.alpha)
    elif integrand == APPROX:
        if params is None:
            raise DomainError("integrand 'approx' needs params")

        def f(r):
            return r * q_tilde(params, r * scenario.alpha)
    else:
        raise DomainError(f"unknown integrand {integrand!r}")

    value, abserr, info = integrate.quad(
        f, scenario.r1, scenario.r2, epsabs=tol, epsrel=0.0, limit=500, full_output=1)[:3]
    if abserr > tol:
        raise ConvergenceError(f"connection mass quadrature reached {abserr:.3g} > {tol:.3g}")
    return max(value, 0.0)
