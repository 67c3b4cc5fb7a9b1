r"""Reference special functions: modified Bessel, incomplete gamma, Marcum Q.

Two independent evaluators of the first-order Marcum Q-function live here.

``marcum_q1`` is the fast one. It uses the Poisson mixture of Erlang tails

.. math::

    Q_1(a, b) = \sum_{k \ge 0} e^{-\lambda} \frac{\lambda^k}{k!}
                \, e^{-x} \sum_{j=0}^{k} \frac{x^j}{j!},
    \qquad \lambda = a^2/2,\; x = b^2/2,

which is the noncentral chi-square (2 degrees of freedom) survival function
written as a Poisson-weighted sum of central ones. Every Erlang tail is in
``[0, 1]`` so dropping the terms ``k > K`` costs at most the Poisson tail mass
beyond ``K``, which is bounded in closed form (see ``_poisson_tail_bound``).

``marcum_q1_quadrature`` integrates the defining integrand
``x exp(-(x^2 + a^2)/2) I0(a x)`` directly and is used as an oracle.
"""

import math

import numpy as np
from scipy import integrate, special as sc

from .errors import ConvergenceError, DomainError

# Terms of the Q1 series are dropped once the remaining Poisson mass is below this.
SERIES_TRUNCATION = 1e-16

# Bessel: power series below max(BESSEL_CROSSOVER, n**2), Hankel asymptotic above.
BESSEL_CROSSOVER = 30.0

_LOG_DBL_MAX = math.log(np.finfo(float).max)


def _check_nonnegative(name, value):
    arr = np.asarray(value, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"{name} must be nonnegative, got {value!r}")
    return arr


# ---------------------------------------------------------------------------
# Modified Bessel function of the first kind
# ---------------------------------------------------------------------------

def _ive_series(n, x):
    """exp(-x) I_n(x) from the ascending power series."""
    h = 0.5 * x
    if h == 0.0:  # also catches subnormal x, where halving underflows
        return 1.0 if n == 0 else 0.0
    term = math.exp(n * math.log(h) - math.lgamma(n + 1) - x)
    total = term
    k = 0
    while True:
        k += 1
        term *= h * h / (k * (k + n))
        total += term
        # all terms are positive; after k > h they shrink geometrically
        if k > h and term <= 1e-17 * total:
            return total


def _ive_asymptotic(n, x):
    """exp(-x) I_n(x) from the large-argument Hankel expansion.

    The exponentially small second branch (relative size exp(-2x)) is dropped,
    which is below 1e-26 in the regime this is used.
    """
    mu = 4.0 * n * n
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(nxt) >= abs(term) and k > 1:
            break
        term = nxt
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_crossover(order):
    """Argument above which the asymptotic branch replaces the power series."""
    return max(BESSEL_CROSSOVER, float(order) ** 2)


def _ive_scalar(n, x):
    if x <= bessel_crossover(n):
        return _ive_series(n, x)
    return _ive_asymptotic(n, x)


def _check_order(order):
    if int(order) != order or order < 0:
        raise DomainError(f"order must be a nonnegative integer, got {order!r}")
    return int(order)


def bessel_i_scaled(order, x):
    """Exponentially scaled Bessel function ``exp(-x) * I_order(x)``.

    Never overflows, so it is the form used inside integrands.
    """
    n = _check_order(order)
    arr = _check_nonnegative("x", x)
    if arr.ndim == 0:
        return _ive_scalar(n, float(arr))
    out = np.empty(arr.shape)
    for idx, xi in np.ndenumerate(arr):
        out[idx] = _ive_scalar(n, float(xi))
    return out


def bessel_i(order, x):
    """Modified Bessel function of the first kind, ``I_order(x)``, for ``x >= 0``.

    Parameters
    ----------
    order : int
        Nonnegative integer order.
    x : float or array_like
        Nonnegative argument.

    Returns
    -------
    float or ndarray

    Raises
    ------
    DomainError
        For negative ``x`` or a non-integer/negative order.
    OverflowError
        If the value exceeds the largest representable double.
    """
    scaled = np.asarray(bessel_i_scaled(order, x), dtype=float)
    xs = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        log_val = np.where(scaled > 0, xs + np.log(scaled), -np.inf)
    if np.any(log_val > _LOG_DBL_MAX):
        raise OverflowError(f"I_{order}(x) overflows double precision")
    out = np.where(scaled > 0, np.exp(log_val), 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Incomplete gamma
# ---------------------------------------------------------------------------

def _check_gamma_args(s, x):
    s_arr = np.asarray(s, dtype=float)
    if np.any(np.isnan(s_arr)) or np.any(s_arr <= 0):
        raise DomainError(f"s must be positive, got {s!r}")
    return s_arr, _check_nonnegative("x", x)


def lower_incomplete_gamma(s, x):
    """Unnormalized lower incomplete gamma ``int_0^x t^(s-1) e^(-t) dt``."""
    s_arr, x_arr = _check_gamma_args(s, x)
    out = sc.gammainc(s_arr, x_arr) * sc.gamma(s_arr)
    return float(out) if np.ndim(out) == 0 else out


def upper_incomplete_gamma(s, x):
    """Unnormalized upper incomplete gamma ``int_x^inf t^(s-1) e^(-t) dt``."""
    s_arr, x_arr = _check_gamma_args(s, x)
    out = sc.gammaincc(s_arr, x_arr) * sc.gamma(s_arr)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Marcum Q, series route
# ---------------------------------------------------------------------------

def _poisson_log_pmf(k, lam):
    return -lam + sc.xlogy(k, lam) - math.lgamma(k + 1)


def _poisson_tail_bound(k, lam):
    """Upper bound on sum_{j > k} Poisson(j; lam), valid when k + 2 > lam.

    Successive weights shrink by lam / (j + 1) <= lam / (k + 2), so the tail is
    dominated by a geometric series starting at w_{k+1}.
    """
    ratio = lam / (k + 2.0)
    return np.exp(_poisson_log_pmf(k + 1, lam)) / (1.0 - ratio)


def marcum_q1(a, b):
    """First-order Marcum Q-function ``Q1(a, b)`` for ``a, b >= 0``.

    Vectorized over broadcast ``a`` and ``b``. The Poisson/Erlang series is
    truncated once the neglected mass is below ``SERIES_TRUNCATION``, so the
    absolute error is dominated by rounding (about 1e-16).
    """
    a_arr = _check_nonnegative("a", a)
    b_arr = _check_nonnegative("b", b)
    a_arr, b_arr = np.broadcast_arrays(a_arr, b_arr)
    lam = 0.5 * a_arr * a_arr
    x = 0.5 * b_arr * b_arr
    lam_max = float(lam.max()) if lam.size else 0.0

    erlang_tail = np.exp(-x)
    total = np.exp(-lam) * erlang_tail
    k = 0
    while True:
        if k + 2 > lam_max:
            bound = _poisson_tail_bound(k, lam)
            if np.max(bound, initial=0.0) <= SERIES_TRUNCATION:
                break
        k += 1
        log_k_fact = math.lgamma(k + 1)
        erlang_tail = erlang_tail + np.exp(-x + sc.xlogy(k, x) - log_k_fact)
        total = total + np.exp(-lam + sc.xlogy(k, lam) - log_k_fact) * erlang_tail

    out = np.where(b_arr == 0.0, 1.0, np.clip(total, 0.0, 1.0))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Marcum Q, quadrature oracle
# ---------------------------------------------------------------------------

def quadrature_tail_bound(a, c):
    r"""Bound on the integrand mass beyond ``x = a + c``.

    Since ``exp(-a x) I0(a x) <= 1`` the integrand is at most
    ``x exp(-(x - a)^2 / 2)``, whose integral over ``[a + c, inf)`` is
    ``exp(-c^2/2) + a sqrt(pi/2) erfc(c / sqrt 2)``.
    """
    return math.exp(-0.5 * c * c) + a * math.sqrt(0.5 * math.pi) * math.erfc(c / math.sqrt(2.0))


def _tail_width(a, budget):
    c = 1.0
    while quadrature_tail_bound(a, c) > budget:
        c *= 1.25
    return c


def marcum_q1_quadrature(a, b, tol=1e-12):
    """``Q1(a, b)`` by adaptive quadrature of its defining integral.

    The infinite upper limit is replaced by ``U = b + a + c`` with ``c`` chosen
    so that ``quadrature_tail_bound(a, c) < tol / 2``; the remaining half of the
    budget goes to the quadrature itself.

    Raises
    ------
    ConvergenceError
        If the adaptive rule cannot certify ``tol / 2`` on ``[b, U]``.
    """
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    a = float(_check_nonnegative("a", a))
    b = float(_check_nonnegative("b", b))
    upper = b + a + _tail_width(a, 0.5 * tol)

    def integrand(x):
        # x exp(-(x^2+a^2)/2) I0(ax) rewritten with the scaled Bessel function
        return x * math.exp(-0.5 * (x - a) ** 2) * _ive_scalar(0, a * x)

    points = [a] if b < a < upper else None
    value, abserr, info = integrate.quad(
        integrand, b, upper, epsabs=0.5 * tol, epsrel=0.0, limit=500,
        points=points, full_output=1)[:3]
    if abserr > 0.5 * tol:
        raise ConvergenceError(
            f"quadrature for Q1({a}, {b}) reached error {abserr:.3g} > {0.5 * tol:.3g}")
    return min(max(value, 0.0), 1.0)
