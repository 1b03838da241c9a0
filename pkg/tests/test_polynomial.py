import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqdist.errors import AllZero, IllConditioned
from eqdist.polynomial import (RealPolynomial, RootTally, count_positive_roots,
                               count_positive_roots_batch, normalize, positive_root_intervals,
                               positive_roots_with_multiplicity, sign_changes, square_free,
                               tally_roots_eigen)


def ascending(*desc):
    """Coefficients written highest power first, stored lowest first."""
    return list(reversed(desc))


def proportional(p: RealPolynomial, expected):
    q = np.array(p.coeffs)
    e = np.array(expected, dtype=float)
    return q.shape == e.shape and np.allclose(q / q[-1], e / e[-1]) and q[-1] * e[-1] > 0


class TestNormalize:
    def test_strips_trailing_zeros(self):
        p = normalize([2, 0, 0])
        assert p.degree == 0 and p.coeffs == (2.0,)

    def test_degree(self):
        assert normalize([1, -3, 2]).degree == 2

    def test_all_zero(self):
        with pytest.raises(AllZero):
            normalize([0, 0, 0])

    def test_snap_band_is_relative(self):
        p = normalize([1.0, 1e-13, 5e-14])
        assert p.degree == 0
        assert normalize([1e-20, 1e-33]).degree == 0

    def test_rejects_stored_trailing_zero(self):
        with pytest.raises(ValueError):
            RealPolynomial((1.0, 0.0))


class TestSquareFree:
    def test_double_root(self):
        assert proportional(square_free(normalize(ascending(1, -2, 1))), ascending(1, -1))

    def test_already_square_free(self):
        assert proportional(square_free(normalize(ascending(1, 0, 1))), ascending(1, 0, 1))

    def test_cubic(self):
        assert proportional(square_free(normalize(ascending(1, -1, -1, 1))), ascending(1, 0, -1))


class TestCounting:
    @pytest.mark.parametrize("desc, expected", [
        ((1, -3, 2), 2),
        ((1, 0, 1), 0),
        ((1, -1, -1, 1), 1),
        ((1, -6, 11, -6), 3),
        ((1, 0, 0, 0, -1), 1),
        ((5,), 0),
        ((1, 0), 0),  # root at zero is not positive
        ((1, -1, 0), 1),
    ])
    def test_examples(self, desc, expected):
        assert count_positive_roots(normalize(ascending(*desc))) == expected

    @pytest.mark.parametrize("desc, tally", [
        ((1, -3, 2), (2, 0, 0)),
        ((1, 0, 1), (0, 0, 1)),
        ((1, -1, -1, 1), (1, 1, 0)),
    ])
    def test_eigen_tally(self, desc, tally):
        t = tally_roots_eigen(normalize(ascending(*desc)))
        assert (t.positive, t.negative, t.complex_pairs) == tally

    def test_eigen_zero_root(self):
        t = tally_roots_eigen(normalize(ascending(1, -1, 0)))
        assert t.zero_root and t.positive == 1 and t.counted_degree == 2

    def test_tally_invariant_enforced(self):
        with pytest.raises(ValueError):
            RootTally(positive=1, negative=0, complex_pairs=0, counted_degree=2)

    @pytest.mark.parametrize("coeffs, expected", [
        ((1, -1, -1, 1), 2), ((1, 2, 3), 0), ((0, -1, 0, 2, -5), 2)])
    def test_sign_changes(self, coeffs, expected):
        assert sign_changes(coeffs) == expected

    def test_sign_changes_all_zero(self):
        with pytest.raises(AllZero):
            sign_changes([0, 0])

    def test_wilkinson_like_roots(self):
        roots = np.arange(1, 11)
        p = normalize(np.polynomial.polynomial.polyfromroots(roots))
        assert count_positive_roots(p) == 10

    def test_ill_conditioned_is_reported(self):
        # clustered roots 1 and 1 + 1e-9 collapse inside the snap band
        p = normalize(np.polynomial.polynomial.polyfromroots([1.0, 1.0 + 1e-9, -3.0]))
        try:
            n = count_positive_roots(p)
        except IllConditioned:
            return
        assert n in (1, 2)


class TestIntervals:
    def test_roots_located(self):
        p = normalize(ascending(1, -6, 11, -6))
        assert np.allclose(positive_root_intervals(p), [1, 2, 3], atol=1e-10)

    def test_residual_small(self):
        p = normalize([1, -6, 1])
        for y in positive_root_intervals(p):
            assert abs(p(y)) <= 1e-8 * 6


coeff = st.floats(-10, 10, allow_nan=False).filter(lambda v: abs(v) > 1e-3)


@given(st.lists(coeff, min_size=2, max_size=9), st.floats(1e-6, 1e6))
def test_scale_invariance(cs, c):
    p = normalize(cs)
    assert count_positive_roots(p) == count_positive_roots(normalize(np.array(cs) * c))


@given(st.lists(coeff, min_size=2, max_size=9))
def test_descartes_parity(cs):
    p = normalize(cs)
    mult = positive_roots_with_multiplicity(p)
    gap = sign_changes(cs) - mult
    assert gap >= 0 and gap % 2 == 0


@given(st.lists(coeff, min_size=2, max_size=9))
def test_sturm_matches_eigen_and_tally_accounts(cs):
    p = normalize(cs)
    t = tally_roots_eigen(p)
    assert t.positive + t.negative + 2 * t.complex_pairs + int(t.zero_root) == t.counted_degree
    try:
        assert count_positive_roots(p) == t.positive
    except IllConditioned:
        pass


separated_roots = st.lists(st.sampled_from([v / 10 for v in range(-20, 21) if v]), min_size=1,
                           max_size=5, unique=True)


@given(separated_roots, st.floats(0.1, 10))
def test_repeated_roots_counted_once(roots, lead):
    # every root doubled; roots at least 0.1 apart
    p = normalize(np.polynomial.polynomial.polyfromroots(roots + roots) * lead)
    try:
        assert count_positive_roots(p) == sum(r > 0 for r in roots)
    except IllConditioned:
        pass


def test_batch_matches_scalar():
    rng = np.random.default_rng(3)
    c = rng.standard_normal((2000, 7))
    c[5] = 0.0
    c[7, -1] = 0.0
    counts, _ = count_positive_roots_batch(c)
    assert counts[5] == -1
    for i in range(0, 2000, 7):
        if i == 5:
            continue
        p = normalize(c[i])
        try:
            expect = count_positive_roots(p)
        except IllConditioned:
            expect = tally_roots_eigen(p).positive
        assert counts[i] == expect
