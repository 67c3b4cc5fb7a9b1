"""Per-``a`` fitting of ``(nu, mu)`` and polynomial regression over ``a``.

The fit minimizes the Riemann-sum error of :func:`marcumq.approximation.discrete_error`.
That objective is a sum of squared residuals, so the search direction is the
Gauss-Newton step and the step length comes from a golden-section line search
along it. If the line search stops making progress before convergence, a
Nelder-Mead simplex restart is run from the current point and the Gauss-Newton
iteration resumes from wherever it lands.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .approximation import (
    ApproxParams,
    DiscreteErrorObjective,
    PolyCoeffs,
    analytic_params_small_a,
)
from .errors import DomainError, RankDeficiencyError

INIT_ANALYTIC = "analytic-small-a"
INIT_PREVIOUS = "previous-grid-point"

# Largest a for which the closed-form small-a parameters are used as a start.
ANALYTIC_START_LIMIT = 1.0

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

FIT_TABLE_HEADER = ("a", "nu", "mu", "error", "iterations", "converged")


@dataclass(frozen=True)
class FitConfig:
    """Discretization and stopping settings for :func:`fit_single`.

    ``init`` is ``"analytic-small-a"``, ``"previous-grid-point"`` (only
    meaningful in :func:`fit_grid`) or an explicit :class:`ApproxParams`.
    """

    delta: float = 1e-4
    b_max: float = 12.0
    init: object = INIT_ANALYTIC
    param_tol: float = 1e-7
    max_iters: int = 10000
    grad_tol: float = 1e-5

    def __post_init__(self):
        if not (self.delta > 0 and self.b_max > 0):
            raise DomainError("delta and b_max must be positive")
        if self.delta > self.b_max:
            raise DomainError(f"delta={self.delta} exceeds b_max={self.b_max}")
        if self.max_iters < 1:
            raise DomainError("max_iters must be at least 1")
        if not self.param_tol > 0:
            raise DomainError("param_tol must be positive")
        if not isinstance(self.init, ApproxParams) and self.init not in (INIT_ANALYTIC, INIT_PREVIOUS):
            raise DomainError(f"unknown init mode {self.init!r}")


@dataclass(frozen=True)
class FitResult:
    a: float
    params: ApproxParams
    achieved_error: float
    iterations: int
    converged: bool
    gradient_norm: float = math.nan


@dataclass(frozen=True)
class RegressionResult:
    coeffs: PolyCoeffs
    residuals: np.ndarray = field(repr=False)
    rss: float


def loglog_start(objective):
    """Starting point from a straight-line fit of ``log(-log Q1)`` against ``log b``.

    ``log(-log Q~) = nu + mu log b`` exactly, so regressing the reference
    column in those coordinates over its bulk gives a start in the right basin
    for any ``a``.
    """
    q = objective.q1
    mask = (q > 1e-6) & (q < 1.0 - 1e-6)
    if mask.sum() < 2:
        return ApproxParams(-math.log(2.0), 2.0)
    x = objective.log_b[mask]
    y = np.log(-np.log(q[mask]))
    mu, nu = np.polyfit(x, y, 1)
    return ApproxParams(float(nu), float(max(mu, 0.1)))


def _initial_params(a, config, objective, previous=None):
    if isinstance(config.init, ApproxParams):
        return config.init
    if config.init == INIT_PREVIOUS and previous is not None:
        return previous
    if a <= ANALYTIC_START_LIMIT:
        return analytic_params_small_a(a)
    return loglog_start(objective)


def _safe_eval(objective, nu, mu):
    if not (mu > 0 and -700 < nu < 700):
        return math.inf
    return objective(nu, mu)


def _golden_line_search(phi, t_hi, tol=1e-3, max_evals=60):
    """Minimize ``phi`` on ``[0, t_hi]`` by golden-section search."""
    lo, hi = 0.0, t_hi
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = phi(x1), phi(x2)
    evals = 2
    while hi - lo > tol * t_hi and evals < max_evals:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = phi(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = phi(x2)
        evals += 1
    return (x1, f1) if f1 <= f2 else (x2, f2)


def central_gradient(objective, nu, mu, h=1e-6):
    """Central-difference gradient of the objective, independent of the Jacobian."""
    g_nu = (objective(nu + h, mu) - objective(nu - h, mu)) / (2 * h)
    g_mu = (objective(nu, mu + h) - objective(nu, mu - h)) / (2 * h)
    return np.array([g_nu, g_mu])


def _simplex_restart(objective, nu, mu, param_tol):
    res = optimize.minimize(
        lambda p: _safe_eval(objective, p[0], p[1]),
        x0=np.array([nu, mu]),
        method="Nelder-Mead",
        options={"xatol": param_tol, "fatol": 0.0, "maxiter": 4000},
    )
    return float(res.x[0]), float(res.x[1]), int(res.nfev)


def minimize_discrete_error(objective, start, config):
    """Run the Gauss-Newton / golden-section iteration from ``start``.

    Returns ``(params, error, iterations, converged, gradient_norm)``.
    """
    nu, mu = start.nu, start.mu
    err = _safe_eval(objective, nu, mu)
    restarted = False
    it = 0
    converged = False
    while it < config.max_iters:
        it += 1
        r, jac = objective.residuals_and_jacobian(nu, mu)
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        if not np.all(np.isfinite(step)):
            step = np.zeros(2)

        def phi(t, step=step):
            return _safe_eval(objective, nu + t * step[0], mu + t * step[1])

        t, f_new = _golden_line_search(phi, 2.0)
        if f_new <= err:
            move = t * step
            nu, mu, err = nu + move[0], mu + move[1], f_new
        else:
            move = np.zeros(2)

        small = np.all(np.abs(move) < config.param_tol)
        if small:
            grad = central_gradient(objective, nu, mu)
            gnorm = float(np.linalg.norm(grad))
            if gnorm <= config.grad_tol * max(1.0, err):
                converged = True
                break
            if restarted:
                break
            # stalled away from a stationary point
            nu, mu, _ = _simplex_restart(objective, nu, mu, config.param_tol)
            err = _safe_eval(objective, nu, mu)
            restarted = True
    grad = central_gradient(objective, nu, mu)
    return ApproxParams(nu, mu), err, it, converged, float(np.linalg.norm(grad))


def fit_single(a, config=None, previous=None):
    """Fit ``(nu, mu)`` minimizing the discrete error at one ``a``.

    Non-convergence is reported through ``FitResult.converged``.
    """
    config = config or FitConfig()
    a = float(a)
    if not a >= 0:
        raise DomainError(f"a must be nonnegative, got {a!r}")
    objective = DiscreteErrorObjective(a, config.delta, config.b_max)
    start = _initial_params(a, config, objective, previous)
    params, err, iters, converged, gnorm = minimize_discrete_error(objective, start, config)
    return FitResult(a=a, params=params, achieved_error=err, iterations=iters,
                     converged=converged, gradient_norm=gnorm)


def fit_grid(a_values, config=None):
    """Fit every ``a`` in ascending ``a_values``; failures stay per-row."""
    config = config or FitConfig()
    a_values = [float(a) for a in a_values]
    if not a_values:
        raise DomainError("a_values must be nonempty")
    if any(x > y for x, y in zip(a_values, a_values[1:])):
        raise DomainError("a_values must be sorted ascending")
    results = []
    previous = None
    for a in a_values:
        res = fit_single(a, config, previous=previous)
        results.append(res)
        if config.init == INIT_PREVIOUS:
            previous = res.params
    return results


def regress_poly(samples, degree):
    """Ordinary least-squares polynomial fit of ``y`` on ``a``.

    The design matrix has columns ``a**0 .. a**degree``. Columns are scaled to
    unit norm and the system is solved by SVD-based least squares, which gives
    the normal-equations solution without forming ``(A^T A)^-1``.

    Raises
    ------
    RankDeficiencyError
        If there are fewer distinct ``a`` values than ``degree + 1``.
    """
    samples = [(float(a), float(y)) for a, y in samples]
    degree = int(degree)
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    a = np.array([s[0] for s in samples])
    y = np.array([s[1] for s in samples])
    if len(np.unique(a)) < degree + 1:
        raise RankDeficiencyError(
            f"degree {degree} needs {degree + 1} distinct a values, got {len(np.unique(a))}")
    design = np.vander(a, degree + 1, increasing=True)
    norms = np.linalg.norm(design, axis=0)
    norms[norms == 0] = 1.0
    sol, _, rank, _ = np.linalg.lstsq(design / norms, y, rcond=None)
    if rank < degree + 1:
        raise RankDeficiencyError(f"design matrix rank {rank} < {degree + 1}")
    coeffs = sol / norms
    residuals = y - design @ coeffs
    return RegressionResult(PolyCoeffs(tuple(coeffs)), residuals, float(residuals @ residuals))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def format_float(x):
    """Shortest round-trip decimal, independent of locale."""
    return repr(float(x))


def write_fit_table(results, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIT_TABLE_HEADER)
        for res in results:
            writer.writerow([
                format_float(res.a), format_float(res.params.nu), format_float(res.params.mu),
                format_float(res.achieved_error), res.iterations,
                "true" if res.converged else "false",
            ])


def read_fit_table(path):
    """Read a fit table; returns a list of dicts with float ``a``, ``nu``, ``mu``.

    Raises ``ValueError`` on a missing column or an unparsable number.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"a", "nu", "mu"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"fit table {path} lacks columns {sorted(missing)}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            try:
                rows.append({k: float(row[k]) for k in ("a", "nu", "mu")})
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{line_no}: {exc}") from None
    if not rows:
        raise ValueError(f"fit table {path} has no rows")
    return rows


def regression_to_dict(result):
    return {
        "degree": result.coeffs.degree,
        "coeffs": list(result.coeffs.coeffs),
        "rss": result.rss,
    }


def write_regression(results, path):
    """Write ``{"mu": {...}, "nu": {...}}`` regression JSON."""
    payload = {name: regression_to_dict(res) for name, res in results.items()}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
