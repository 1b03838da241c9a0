"""Large-d approximations: expected equilibrium count and a Poisson law for p_m."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ApproxResult:
    d: int
    mu: float
    p_approx: tuple[float, ...]


def expected_asymptotic(d: int) -> float:
    """Leading-order expected number of internal equilibria, sqrt(2d - 1) / 2."""
    if d < 2:
        raise DomainError("d must be >= 2")
    return math.sqrt(2 * d - 1) / 2


def poisson_approx(d: int) -> ApproxResult:
    """Poisson(mu) probabilities for m = 0..d-1, deliberately not renormalized."""
    mu = expected_asymptotic(d)
    p = [math.exp(-mu)]
    for m in range(1, d):
        p.append(p[-1] * mu / m)
    return ApproxResult(d=d, mu=mu, p_approx=tuple(p))
