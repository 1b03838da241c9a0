import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqdist.errors import DomainError, TooLarge
from eqdist.signs import (DELTA, SignBias, SignChangeTable, binary_entropy, descartes_bounds,
                          entropy_bounds, p_kn_explicit, p_kn_initial, p_kn_oracle, p_kn_recursive,
                          p_kn_symmetric, partial_binomial_sums, sign_change_table,
                          symmetric_upper_bound)

ALPHAS = (0.1, 0.25, 0.5, 0.75, 0.9)


def naive_oracle(alpha, k, n):
    """Pattern-by-pattern enumeration with itertools, independent of the bit-trick table."""
    total = 0.0
    for pattern in itertools.product((True, False), repeat=n + 1):
        if sum(a != b for a, b in zip(pattern, pattern[1:])) == k:
            pos = sum(pattern)
            total += alpha**pos * (1 - alpha) ** (n + 1 - pos)
    return total


def test_bias_validation():
    with pytest.raises(DomainError):
        SignBias(1.5)
    assert SignBias(0.5).symmetric and not SignBias(0.3).symmetric


def test_symmetric_examples():
    assert p_kn_symmetric(0, 0) == 1
    assert p_kn_symmetric(2, 4) == 0.375
    assert sum(p_kn_symmetric(k, 9) for k in range(10)) == 1
    with pytest.raises(DomainError):
        p_kn_symmetric(5, 4)


def test_initial_examples():
    assert p_kn_initial(0.5, 4, 0) == 1 / 16
    assert p_kn_initial(0.5, 4, 1) == 4 / 16
    assert p_kn_initial(0.5, 4, 3) == pytest.approx(4 / 16)
    assert p_kn_initial(0.5, 4, 4) == pytest.approx(1 / 16)
    a = 0.37
    assert p_kn_initial(a, 2, 2) == pytest.approx(a * (1 - a))
    assert p_kn_initial(0.3, 3, 3) == pytest.approx(2 * (0.3 * 0.7) ** 2)
    assert p_kn_initial(0.3, 3, 3) == pytest.approx(0.0882)
    with pytest.raises(DomainError):
        p_kn_initial(0.3, 6, 3)


@pytest.mark.parametrize("alpha", ALPHAS + (0.3, 0.5 + 1e-9, 0.5 - 3e-7))
@pytest.mark.parametrize("n", range(1, 13))
def test_initial_against_oracle(alpha, n):
    for k in sorted({0, 1, n - 1, n}):
        assert p_kn_initial(alpha, n, k) == pytest.approx(p_kn_oracle(alpha, k, n), abs=1e-13)


def test_p1_near_half_is_continuous():
    n = 9
    at_half = p_kn_initial(0.5, n, 1)
    for eps in (1e-12, 1e-9, 1e-7, 2e-6):
        assert p_kn_initial(0.5 + eps, n, 1) == pytest.approx(at_half, abs=10 * eps + 1e-15)


def test_recursion_examples():
    a = 0.3
    t = p_kn_recursive(a, 4)
    assert t[2, 4] == pytest.approx(a * (1 - a) * (t[0, 2] - t[2, 2]) + t[2, 3], abs=1e-15)
    assert t[2, 4] == pytest.approx(0.36540, abs=1e-12)
    assert t[2, 4] == pytest.approx(3 * a * (1 - a) * (2 * a * a - 2 * a + 1), abs=1e-14)
    assert t[5, 4] == 0.0 and t.method == "recursive"


@pytest.mark.parametrize("alpha", [v / 10 for v in range(1, 10)])
def test_rows_normalized(alpha):
    t = p_kn_recursive(alpha, 20)
    for n in range(21):
        row = t.row(n)
        assert math.fsum(row) == pytest.approx(1.0, abs=1e-12)
        assert all(0 <= v <= 1 for v in row)


def test_explicit_examples():
    a = 0.42
    assert p_kn_explicit(a, 1, 2) == pytest.approx(2 * a * (1 - a))
    assert p_kn_explicit(0.3, 2, 4) == pytest.approx(0.36540, abs=1e-12)
    assert p_kn_explicit(0.5, 3, 7) == p_kn_symmetric(3, 7)
    assert p_kn_explicit(0.0, 0, 5) == 1.0 and p_kn_explicit(1.0, 2, 5) == 0.0


@pytest.mark.parametrize("alpha", ALPHAS)
def test_triple_agreement(alpha):
    table = p_kn_recursive(alpha, 16)
    for n in range(17):
        for k in range(n + 1):
            o = p_kn_oracle(alpha, k, n)
            assert table[k, n] == pytest.approx(o, abs=1e-10)
            assert p_kn_explicit(alpha, k, n) == pytest.approx(o, abs=1e-10)
            if alpha == 0.5:
                assert abs(o - p_kn_symmetric(k, n)) <= 1e-12


@pytest.mark.parametrize("alpha", [0.3, 0.5])
def test_bit_oracle_matches_naive_enumeration(alpha):
    for n in range(0, 9):
        for k in range(n + 1):
            assert p_kn_oracle(alpha, k, n) == pytest.approx(naive_oracle(alpha, k, n), abs=1e-14)


def test_oracle_examples_and_cap():
    a = 0.27
    assert p_kn_oracle(a, 0, 1) == pytest.approx(a * a + (1 - a) ** 2)
    assert p_kn_oracle(0.5, 1, 1) == 0.5
    assert p_kn_oracle(a, 3, 4) == pytest.approx(4 * a * a * (1 - a) ** 2)
    with pytest.raises(TooLarge):
        p_kn_oracle(0.5, 1, 25)


@given(st.floats(0, 1), st.integers(0, 14), st.data())
def test_reflection_symmetry(alpha, n, data):
    k = data.draw(st.integers(0, n))
    assert p_kn_recursive(alpha, n)[k, n] == pytest.approx(p_kn_recursive(1 - alpha, n)[k, n], abs=1e-12)
    assert p_kn_oracle(alpha, k, n) == pytest.approx(p_kn_oracle(1 - alpha, k, n), abs=1e-12)


def test_tables_by_method():
    for method in ("explicit", "oracle", "recursive"):
        t = sign_change_table(0.3, 6, method)
        assert isinstance(t, SignChangeTable) and t.method == method
        assert t[2, 4] == pytest.approx(0.3654, abs=1e-12)
    assert sign_change_table(0.5, 4, "symmetric")[2, 4] == 0.375
    with pytest.raises(DomainError):
        sign_change_table(0.3, 4, "symmetric")
    with pytest.raises(TooLarge):
        sign_change_table(0.3, 30, "oracle")


# ------------------------------------------------------------------ binomial lemmas

def test_partial_sum_examples():
    for n in range(1, 12):
        assert partial_binomial_sums(n, 0) == (2 ** (n - 1), 2 ** (n - 1))
    assert partial_binomial_sums(4, 2)[0] == 7
    assert partial_binomial_sums(1, 1) == (0, 1)


def test_partial_sums_exact():
    for n in range(0, 31):
        for k in range(n + 1):
            even = sum(math.comb(n, j) for j in range(k, n + 1) if j % 2 == 0)
            odd = sum(math.comb(n, j) for j in range(k, n + 1) if j % 2 == 1)
            assert partial_binomial_sums(n, k) == (even, odd)


def test_entropy():
    assert binary_entropy(0.5) == 1
    assert binary_entropy(0) == binary_entropy(1) == 0
    assert binary_entropy(0.11) == pytest.approx(binary_entropy(0.89))


def test_entropy_examples():
    b = entropy_bounds(10, 5)
    assert b.lower == pytest.approx(228.97, abs=0.01)
    assert b.lower <= 638 <= b.upper
    b = entropy_bounds(10, 3)
    assert b.upper == pytest.approx(DELTA * 2 ** (10 * binary_entropy(0.3)))
    assert b.upper == pytest.approx(440.73, abs=0.01) and b.upper >= 176


def test_entropy_bounds_bracket():
    for n in range(0, 31):
        for k in range(n + 1):
            s = sum(math.comb(n, j) for j in range(k + 1))
            b = entropy_bounds(n, k)
            assert b.lower <= s <= b.upper
            if b.lovasz is not None:
                assert sum(math.comb(n, j) for j in range(k)) <= b.lovasz


def test_printed_high_regime_fails():
    # finding: the stated k >= n/2 bracket with H(k/n) excludes the true sum
    n, k = 4, 3
    h = 2 ** (n * binary_entropy(k / n))
    lower, upper = 2**n - DELTA * h, 2**n - h / math.sqrt(8 * k * (1 - k / n))
    s = sum(math.comb(n, j) for j in range(k + 1))
    assert not lower <= s <= upper


# ------------------------------------------------------------------ Descartes bounds

def test_bounds_d2_half():
    b = descartes_bounds(2, 0.5)
    assert b.upper == (0.5, 0.5) and b.lower_p0 == 0.5 and b.lower_p1 == 0.5


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_bounds_d3_pin_p1(alpha):
    b = descartes_bounds(3, alpha)
    assert b.upper[1] == pytest.approx(2 * alpha * (1 - alpha))
    assert b.lower_p1 == pytest.approx(2 * alpha * (1 - alpha))


def test_bounds_d2_general_alpha():
    b = descartes_bounds(2, 0.3)
    assert b.lower_p0 == pytest.approx(0.58) and b.upper[0] == pytest.approx(0.58)
    assert b.lower_p1 == pytest.approx(0.42) and b.upper[1] == pytest.approx(0.42)


@pytest.mark.parametrize("d", range(2, 12))
def test_bounds_half(d):
    b = descartes_bounds(d, 0.5)
    assert b.upper_pd1 == pytest.approx(1 / 2 ** (d - 1))
    assert b.upper_pd2 == pytest.approx((d - 1) / 2 ** (d - 1))
    assert b.upper[-1] == pytest.approx(b.upper_pd1)
    for m in range(d):
        direct = sum(math.comb(d - 1, j) for j in range(m, d, 2)) / 2 ** (d - 1)
        assert symmetric_upper_bound(d, m) == pytest.approx(direct, abs=1e-15)
        assert b.upper[m] <= 0.5 + 1e-15


@given(st.integers(2, 15), st.floats(0, 1))
def test_bounds_valid(d, alpha):
    b = descartes_bounds(d, alpha)
    values = b.upper + (b.lower_p0, b.lower_p1, b.upper_pd2, b.upper_pd1)
    assert all(0 <= v <= 1 for v in values)
    assert b.lower_p0 <= b.upper[0] + 1e-12 and b.lower_p1 <= b.upper[1] + 1e-12
