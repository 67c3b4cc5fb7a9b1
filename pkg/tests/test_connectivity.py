import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from marcumq.approximation import ApproxParams, published_poly_params
from marcumq.calibration import fit_single
from marcumq.connectivity import (
    Scenario,
    connection_mass_closed_form,
    connection_mass_numeric,
    pair_connectivity,
    rician_power_ccdf,
)
from marcumq.errors import DomainError
from marcumq.special import marcum_q1

from oracles import gaussian_mass, random_scenarios

# Q1(2, sqrt(3)) from marcum_q1_quadrature(..., 1e-12); 30-digit mpmath agrees.
CCDF_K2_HALF = 0.7097453802341117
# int_0^3 r Q1(sqrt 2, r) dr by quadrature; 30-digit mpmath gives 1.86365827918994549.
MASS_K1_EXACT = 1.8636582791899455
# H(1.5) at K=2, alpha=1 (exact and via the published polynomials).
H_EXACT = 0.7907677793967701
H_POLY = 0.7906900292605427

GAUSSIAN = ApproxParams(-math.log(2.0), 2.0)


def test_scenario_validation():
    with pytest.raises(DomainError):
        Scenario(K=1.0, alpha=1.0, r1=2.0, r2=2.0)
    with pytest.raises(DomainError):
        Scenario(K=0.0, alpha=1.0, r1=0.0, r2=2.0)
    with pytest.raises(DomainError):
        Scenario(K=1.0, alpha=-1.0, r1=0.0, r2=2.0)
    with pytest.raises(DomainError):
        Scenario(K=1.0, alpha=1.0, r1=0.0, r2=2.0, omega=0.0)
    with pytest.raises(DomainError):
        Scenario.from_dict({"K": 1.0, "alpha": 1.0, "r1": 0.0})
    with pytest.raises(DomainError):
        Scenario.from_dict({"K": 1.0, "alpha": 1.0, "r1": 0.0, "r2": 1.0, "beta": 3})


def test_scenario_json(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"K": 2, "alpha": 1.5, "r1": 0.1, "r2": 3}))
    sc = Scenario.from_json(path)
    assert sc == Scenario(2.0, 1.5, 0.1, 3.0, 1.0)
    assert sc.a == pytest.approx(2.0)


# --- power CCDF ------------------------------------------------------------------

def test_ccdf_at_zero():
    for K in (0.5, 1.0, 7.0):
        assert rician_power_ccdf(K, 1.3, 0.0) == 1.0


@given(st.floats(0.0, 10.0))
def test_ccdf_substitution(x):
    assert rician_power_ccdf(1.0, 1.0, x) == marcum_q1(math.sqrt(2.0), math.sqrt(4.0 * x))


def test_ccdf_golden():
    assert rician_power_ccdf(2.0, 1.0, 0.5) == pytest.approx(CCDF_K2_HALF, abs=1e-10)


def test_ccdf_domain():
    with pytest.raises(DomainError):
        rician_power_ccdf(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        rician_power_ccdf(1.0, 0.0, 1.0)


# --- pair connectivity -------------------------------------------------------------

def test_pair_connectivity_at_zero_distance():
    for method in ("exact", "poly"):
        assert pair_connectivity(3.0, 1.2, 0.0, method) == 1.0


def test_pair_connectivity_small_k_limit():
    K = 1e-12
    for r in (0.3, 1.0, 2.5):
        assert pair_connectivity(K, 1.0, r) == pytest.approx(math.exp(-0.5 * r * r), abs=1e-11)


def test_pair_connectivity_exact_vs_poly():
    exact = pair_connectivity(2.0, 1.0, 1.5, "exact")
    poly = pair_connectivity(2.0, 1.0, 1.5, "poly")
    assert exact == pytest.approx(H_EXACT, abs=1e-12)
    assert poly == pytest.approx(H_POLY, abs=1e-12)
    assert abs(exact - poly) <= 0.02


def test_pair_connectivity_approx_uses_given_params():
    p = ApproxParams(-2.5, 2.7)
    assert pair_connectivity(2.0, 1.0, 1.5, "approx", params=p) == math.exp(-math.exp(-2.5) * 1.5 ** 2.7)


def test_pair_connectivity_approx_fits_when_needed():
    fitted = fit_single(2.0).params
    assert pair_connectivity(2.0, 1.0, 1.5, "approx") == pytest.approx(
        pair_connectivity(2.0, 1.0, 1.5, "approx", params=fitted), rel=1e-14)


def test_pair_connectivity_exact_monotone_in_r():
    r = np.linspace(0.0, 8.0, 200)
    h = np.array([pair_connectivity(4.0, 0.8, x) for x in r])
    assert np.all((h >= 0) & (h <= 1))
    assert np.all(np.diff(h) <= 0)


def test_pair_connectivity_bad_method():
    with pytest.raises(DomainError):
        pair_connectivity(1.0, 1.0, 1.0, "bogus")


# --- connection mass -----------------------------------------------------------------

def test_closed_form_degenerate_interval():
    # bypass the r1 < r2 invariant to probe the formula on an empty interval
    sc = Scenario(K=2.0, alpha=1.0, r1=0.0, r2=1.0)
    object.__setattr__(sc, "r1", 1.0)
    assert connection_mass_closed_form(sc, published_poly_params(2.0)) == 0.0


def test_closed_form_gaussian_total_mass():
    sc = Scenario(K=1e-12, alpha=1.0, r1=0.0, r2=50.0)
    assert connection_mass_closed_form(sc, GAUSSIAN) == pytest.approx(1.0, abs=1e-12)


def test_closed_form_gaussian_window():
    sc = Scenario(K=1e-12, alpha=1.7, r1=0.4, r2=1.9)
    assert connection_mass_closed_form(sc, GAUSSIAN) == pytest.approx(gaussian_mass(1.7, 0.4, 1.9), rel=1e-13)


def test_closed_form_matches_quadrature_with_fitted_params():
    sc = Scenario(K=2.0, alpha=1.0, r1=0.1, r2=3.0)
    params = fit_single(sc.a).params
    assert connection_mass_closed_form(sc, params) == pytest.approx(
        connection_mass_numeric(sc, "approx", params, 1e-12), abs=1e-10)


def test_closed_form_tail_branch():
    # both limits deep in the tail; the upper-gamma branch must not cancel to zero
    sc = Scenario(K=2.0, alpha=2.0, r1=4.0, r2=6.0)
    p = published_poly_params(sc.a)
    closed = connection_mass_closed_form(sc, p)
    numeric = connection_mass_numeric(sc, "approx", p, 1e-20)
    assert closed > 0
    assert closed == pytest.approx(numeric, rel=1e-8)


def test_numeric_exact_golden_and_error_metric():
    sc = Scenario(K=1.0, alpha=1.0, r1=0.0, r2=3.0)
    exact = connection_mass_numeric(sc, "exact", tol=1e-10)
    assert exact == pytest.approx(MASS_K1_EXACT, abs=1e-10)
    closed = connection_mass_closed_form(sc, published_poly_params(sc.a))
    # end-to-end relative error at K=1, recorded at build time: 2.997e-3
    assert abs(exact - closed) / exact == pytest.approx(2.997e-3, rel=1e-3)


def test_numeric_requires_params_for_approx():
    sc = Scenario(K=1.0, alpha=1.0, r1=0.0, r2=3.0)
    with pytest.raises(DomainError):
        connection_mass_numeric(sc, "approx")
    with pytest.raises(DomainError):
        connection_mass_numeric(sc, "other")


def test_mass_monotone_in_r2():
    p = published_poly_params(math.sqrt(6.0))
    prev_c = prev_n = 0.0
    for r2 in np.linspace(0.6, 5.0, 12):
        sc = Scenario(K=3.0, alpha=1.1, r1=0.5, r2=float(r2))
        c = connection_mass_closed_form(sc, p)
        n = connection_mass_numeric(sc, "exact")
        assert c >= prev_c and n >= prev_n
        prev_c, prev_n = c, n


@settings(max_examples=30, deadline=None)
@given(st.floats(1.0, 10.0), st.floats(0.5, 2.0), st.floats(0.0, 2.0), st.floats(0.1, 1.5), st.floats(0.1, 1.5))
def test_mass_additive(K, alpha, r1, w1, w2):
    p = published_poly_params(math.sqrt(2 * K))
    whole = Scenario(K, alpha, r1, r1 + w1 + w2)
    left = Scenario(K, alpha, r1, r1 + w1)
    right = Scenario(K, alpha, r1 + w1, r1 + w1 + w2)
    total = connection_mass_closed_form(left, p) + connection_mass_closed_form(right, p)
    assert connection_mass_closed_form(whole, p) == pytest.approx(total, abs=1e-10)


def test_identity_on_random_scenarios():
    for case in random_scenarios(20, seed=7):
        sc = Scenario(**case)
        p = published_poly_params(sc.a)
        closed = connection_mass_closed_form(sc, p)
        assert closed >= 0
        assert abs(closed - connection_mass_numeric(sc, "approx", p, 1e-10)) <= 1e-8 * max(1.0, closed)
