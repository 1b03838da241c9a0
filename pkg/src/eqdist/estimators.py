"""scikit-learn style wrapper around the equilibrium counter."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .sampling import count_equilibria_batch


class EquilibriumCounter(TransformerMixin, BaseEstimator):
    """Map games to their number of internal equilibria.

    With ``input="gaps"`` each row of X is a gap vector beta of length d. With
    ``input="payoffs"`` each row is the concatenation (a_0..a_{d-1}, b_0..b_{d-1}).
    ``fit`` records the empirical count distribution of the training games.
    Degenerate (all-zero) games transform to -1.
    """

    def __init__(self, input: str = "gaps"):
        self.input = input

    def _gaps(self, X) -> np.ndarray:
        X = check_array(X, dtype=np.float64)
        if self.input == "gaps":
            beta = X
        elif self.input == "payoffs":
            if X.shape[1] % 2:
                raise ValueError("payoff rows need an even number of columns (a then b)")
            half = X.shape[1] // 2
            beta = X[:, :half] - X[:, half:]
        else:
            raise ValueError(f"input must be 'gaps' or 'payoffs', got {self.input!r}")
        if beta.shape[1] < 2:
            raise ValueError("games need d >= 2 players")
        return beta

    def fit(self, X, y=None):
        beta = self._gaps(X)
        counts, _ = count_equilibria_batch(beta)
        valid = counts[counts >= 0]
        d = beta.shape[1]
        self.n_features_in_ = np.asarray(X).shape[1]
        self.d_ = d
        n = max(valid.size, 1)
        self.distribution_ = np.bincount(valid, minlength=d) / n
        self.stderr_ = np.sqrt(self.distribution_ * (1 - self.distribution_) / n)
        self.n_degenerate_ = int(np.count_nonzero(counts == -1))
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "distribution_")
        beta = self._gaps(X)
        if beta.shape[1] != self.d_:
            raise ValueError(f"fitted for d={self.d_}, got d={beta.shape[1]}")
        counts, _ = count_equilibria_batch(beta)
        return counts.reshape(-1, 1)
