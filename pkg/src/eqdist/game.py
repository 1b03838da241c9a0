"""d-player two-strategy games and their equilibrium polynomial.

An internal equilibrium x in (0, 1) of the replicator dynamics solves
``sum_k beta_k * C(d-1, k) * x**k * (1-x)**(d-1-k) = 0`` with
``beta_k = a_k - b_k``. Substituting ``y = x / (1 - x)`` turns this into a
polynomial in y whose positive roots are the internal equilibria.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .errors import AllZero, Degenerate, IllConditioned
from .polynomial import (RealPolynomial, count_positive_roots_robust, normalize, positive_root_intervals,
                         positive_roots_eigen)


@dataclass(frozen=True)
class PayoffTable:
    """Payoffs ``a[k]`` (resp. ``b[k]``) of an A (resp. B) strategist facing k other A players."""

    a: tuple[float, ...]
    b: tuple[float, ...]

    def __init__(self, a: Sequence[float], b: Sequence[float]):
        a, b = tuple(float(v) for v in a), tuple(float(v) for v in b)
        if len(a) != len(b):
            raise ValueError(f"a and b differ in length ({len(a)} vs {len(b)})")
        if len(a) < 2:
            raise ValueError("group size d must be at least 2")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def d(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class GapVector:
    beta: tuple[float, ...]

    def __init__(self, beta: Sequence[float]):
        beta = tuple(float(v) for v in beta)
        if len(beta) < 2:
            raise ValueError("group size d must be at least 2")
        object.__setattr__(self, "beta", beta)

    @property
    def d(self) -> int:
        return len(self.beta)


def binomial_weights(d: int) -> np.ndarray:
    """``C(d-1, k)`` for k = 0..d-1 as floats."""
    return np.array([comb(d - 1, k) for k in range(d)], dtype=float)


def gaps(t: PayoffTable) -> GapVector:
    return GapVector([ak - bk for ak, bk in zip(t.a, t.b)])


def build_game_polynomial(g: GapVector) -> RealPolynomial:
    return normalize(np.asarray(g.beta) * binomial_weights(g.d))


def _polynomial_or_degenerate(t: PayoffTable | GapVector) -> RealPolynomial:
    g = gaps(t) if isinstance(t, PayoffTable) else t
    try:
        return build_game_polynomial(g)
    except AllZero as exc:
        raise Degenerate("all payoff gaps are zero; every x is an equilibrium") from exc


def count_internal_equilibria(t: PayoffTable | GapVector) -> int:
    """Number of internal equilibria, i.e. distinct positive roots of the game polynomial."""
    return count_positive_roots_robust(_polynomial_or_degenerate(t))


def equilibrium_frequencies(t: PayoffTable | GapVector) -> list[float]:
    """Frequencies x* of strategy A at the internal equilibria, ascending."""
    p = _polynomial_or_degenerate(t)
    try:
        roots = positive_root_intervals(p)
    except IllConditioned:
        roots = positive_roots_eigen(p)
    return [y / (1.0 + y) for y in roots]
