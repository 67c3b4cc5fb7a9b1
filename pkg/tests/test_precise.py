import pytest

from marcumq.approximation import continuous_error, discrete_error, table_params
from marcumq.precise import PreciseMarcumQ, continuous_error_mp, discrete_error_mp
from marcumq.special import marcum_q1


@pytest.mark.parametrize("a", [0.0, 1.0, 3.5, 6.0])
def test_precise_q1_matches_double(a):
    q = PreciseMarcumQ(a)
    for b in (0.0, 0.7, 2.0, 5.5, 9.0):
        assert float(q(b)) == pytest.approx(marcum_q1(a, b), abs=1e-14)


def test_precise_errors_match_double_where_resolvable():
    p = table_params(2.0)
    assert float(continuous_error_mp(2.0, p, dps=30)) == pytest.approx(
        continuous_error(2.0, p, 12.0, 1e-16), rel=1e-10)
    assert float(discrete_error_mp(2.0, p, 1e-2, dps=30)) == pytest.approx(
        discrete_error(2.0, p, 1e-2, 12.0), rel=1e-10)
