import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqdist.approx import expected_asymptotic, poisson_approx
from eqdist.errors import DomainError


def test_expected_examples():
    assert expected_asymptotic(2) == pytest.approx(0.8660, abs=1e-4)
    assert expected_asymptotic(13) == 2.5
    assert expected_asymptotic(5) == 1.5
    with pytest.raises(DomainError):
        expected_asymptotic(1)


def test_poisson_examples():
    r = poisson_approx(13)
    assert r.mu == 2.5 and len(r.p_approx) == 13
    assert r.p_approx[0] == pytest.approx(math.exp(-2.5))
    assert r.p_approx[0] == pytest.approx(0.0821, abs=1e-4)
    assert r.p_approx[2] == pytest.approx(2.5**2 * math.exp(-2.5) / 2)
    assert r.p_approx[2] == pytest.approx(0.2565, abs=1e-4)


@given(st.integers(2, 300))
def test_poisson_properties(d):
    r = poisson_approx(d)
    assert r.mu > 0
    assert all(p > 0 for p in r.p_approx)
    total = math.fsum(r.p_approx)
    # each term carries a few ulps of rounding
    assert total <= 1 + 1e-14
    first_missing = math.exp(d * math.log(r.mu) - r.mu - math.lgamma(d + 1))
    if first_missing > 1e-12:
        assert total < 1
    for m, (a, b) in enumerate(zip(r.p_approx, r.p_approx[1:])):
        assert b / a == pytest.approx(r.mu / (m + 1), rel=1e-14)
    for m in (0, d // 2, d - 1):
        exact = math.exp(m * math.log(r.mu) - r.mu - math.lgamma(m + 1))
        assert r.p_approx[m] == pytest.approx(exact, rel=1e-10)
