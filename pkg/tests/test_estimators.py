import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from eqdist.estimators import EquilibriumCounter


def test_transform_counts_gaps():
    X = np.array([[1, -3, 1], [2, -1, 2], [0, 0, 0]], dtype=float)
    est = EquilibriumCounter().fit(X)
    assert est.transform(X).ravel().tolist() == [2, 0, -1]
    assert est.n_degenerate_ == 1
    assert est.distribution_.tolist() == [0.5, 0.0, 0.5]


def test_payoff_input():
    X = np.array([[0, 2, 1, 0], [2, 3, 1, 0]], dtype=float)
    out = EquilibriumCounter(input="payoffs").fit_transform(X)
    assert out.ravel().tolist() == [1, 0]


def test_params_and_clone():
    est = EquilibriumCounter(input="payoffs")
    assert est.get_params() == {"input": "payoffs"}
    assert clone(est).set_params(input="gaps").input == "gaps"


def test_validation():
    with pytest.raises(NotFittedError):
        EquilibriumCounter().transform(np.ones((2, 3)))
    with pytest.raises(ValueError):
        EquilibriumCounter().fit(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        EquilibriumCounter(input="payoffs").fit(np.ones((2, 3)))
    with pytest.raises(ValueError):
        EquilibriumCounter(input="bogus").fit(np.ones((2, 3)))
    est = EquilibriumCounter().fit(np.ones((2, 3)))
    with pytest.raises(ValueError):
        est.transform(np.ones((2, 4)))


def test_fit_distribution_matches_known_value():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((200000, 3))
    est = EquilibriumCounter().fit(X)
    assert est.distribution_[1] == pytest.approx(0.5, abs=0.005)
    assert est.distribution_.sum() == pytest.approx(1.0)
    assert np.all(est.stderr_ > 0)


def test_in_pipeline():
    X = np.random.default_rng(1).standard_normal((50, 4))
    pipe = make_pipeline(EquilibriumCounter())
    assert pipe.fit_transform(X).shape == (50, 1)
