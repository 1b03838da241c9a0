"""Exact probabilities of root configurations, evaluated by Monte Carlo integration.

For a game polynomial of degree n = d - 1, the probability of m positive roots,
k complex-conjugate pairs and n - m - 2k negative roots is an integral over the
root coordinates (positive reals, negative reals, moduli and arguments of the
upper-half-plane roots) after the leading-coefficient variable has been
integrated out analytically. Summing over k gives p_m.

The unbounded coordinates are mapped to the unit cube with ``x = t / (1 - t)``
(Jacobian ``1 / (1 - t)**2``) and the arguments with ``alpha = pi * t``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln
from scipy.stats import qmc

from .errors import DomainError, NumericOverflow
from .game import binomial_weights
from .sampling import (DistributionSpec, EquilibriumDistribution, Family, block_rng,
                       resolve_threads, run_blocks)

log = logging.getLogger(__name__)

SHARD_SIZE = 1 << 18
SOBOL_REPLICATES = 16
SAMPLERS = ("mc", "sobol")


@dataclass(frozen=True)
class RootConfiguration:
    n: int
    m: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("degree n must be >= 1")
        if not 0 <= self.m <= self.n:
            raise DomainError(f"m={self.m} outside [0, {self.n}]")
        if not 0 <= self.k <= (self.n - self.m) // 2:
            raise DomainError(f"k={self.k} outside [0, {(self.n - self.m) // 2}]")

    @property
    def negatives(self) -> int:
        return self.n - self.m - 2 * self.k

    @property
    def d(self) -> int:
        return self.n + 1

    @classmethod
    def all_for(cls, d: int) -> list["RootConfiguration"]:
        n = d - 1
        return [cls(n, m, k) for m in range(n + 1) for k in range((n - m) // 2 + 1)]


@dataclass(frozen=True)
class MixedRootPoint:
    """Real roots ``xs`` (positives first) and upper-half-plane roots ``rs * exp(i * alphas)``."""

    xs: tuple[float, ...]
    rs: tuple[float, ...] = ()
    alphas: tuple[float, ...] = ()

    def __init__(self, xs: Sequence[float], rs: Sequence[float] = (), alphas: Sequence[float] = ()):
        object.__setattr__(self, "xs", tuple(float(v) for v in xs))
        object.__setattr__(self, "rs", tuple(float(v) for v in rs))
        object.__setattr__(self, "alphas", tuple(float(v) for v in alphas))
        if len(self.rs) != len(self.alphas):
            raise ValueError("rs and alphas must have equal length")
        if any(r <= 0 for r in self.rs):
            raise ValueError("moduli must be positive")
        if any(not 0 < a < math.pi for a in self.alphas):
            raise ValueError("arguments must lie in (0, pi)")

    @property
    def n(self) -> int:
        return len(self.xs) + 2 * len(self.rs)

    def fits(self, cfg: RootConfiguration) -> bool:
        x = self.xs
        return (self.n == cfg.n and len(self.rs) == cfg.k
                and all(v > 0 for v in x[: cfg.m]) and all(v < 0 for v in x[cfg.m:]))

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (np.array(self.xs, dtype=float).reshape(1, -1),
                np.array(self.rs, dtype=float).reshape(1, -1),
                np.array(self.alphas, dtype=float).reshape(1, -1))


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    stderr: float
    n_points: int
    n_discarded: int = 0
    insufficient: bool = False

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be non-negative")


# ---------------------------------------------------------------- batch kernels

def sigma_batch(xs: np.ndarray, rs: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Elementary symmetric polynomials sigma_0..sigma_n of the roots, one row per point.

    Builds the monic polynomial prod(t - x_i) * prod(t**2 - 2 r cos(alpha) t + r**2)
    in descending powers; sigma_j = (-1)**j times its j-th coefficient.
    """
    rows = xs.shape[0]
    c = np.ones((rows, 1))
    for i in range(xs.shape[1]):
        nxt = np.zeros((rows, c.shape[1] + 1))
        nxt[:, :-1] = c
        nxt[:, 1:] -= c * xs[:, i:i + 1]
        c = nxt
    for j in range(rs.shape[1]):
        lin = -2.0 * rs[:, j:j + 1] * np.cos(alphas[:, j:j + 1])
        const = rs[:, j:j + 1] ** 2
        nxt = np.zeros((rows, c.shape[1] + 2))
        nxt[:, :-2] = c
        nxt[:, 1:-1] += c * lin
        nxt[:, 2:] += c * const
        c = nxt
    return c * (-1.0) ** np.arange(c.shape[1])


def vandermonde_batch(xs: np.ndarray, rs: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Product of |z_i - z_j| over all root pairs, in real arithmetic."""
    out = np.ones(xs.shape[0])
    n_real, k = xs.shape[1], rs.shape[1]
    for i in range(n_real):
        for j in range(i + 1, n_real):
            out *= np.abs(xs[:, i] - xs[:, j])
    cos, sin = np.cos(alphas), np.sin(alphas)
    for j in range(k):
        r = rs[:, j]
        out *= 2.0 * r * sin[:, j]
        for i in range(n_real):
            x = xs[:, i]
            # |z - x| * |conj(z) - x|
            out *= r * r - 2.0 * x * r * cos[:, j] + x * x
        for l in range(j + 1, k):
            s = r * r + rs[:, l] ** 2
            twice = 2.0 * r * rs[:, l]
            out *= (s - twice * np.cos(alphas[:, j] - alphas[:, l])) \
                * (s - twice * np.cos(alphas[:, j] + alphas[:, l]))
    return out


def elementary_symmetric_batch(w: np.ndarray) -> np.ndarray:
    """e_0..e_d of the columns of w, one row per point."""
    e = np.zeros((w.shape[0], w.shape[1] + 1))
    e[:, 0] = 1.0
    for j in range(w.shape[1]):
        e[:, 1:] = e[:, 1:] + w[:, j:j + 1] * e[:, :-1]
    return e


def compensated_row_sum(terms: np.ndarray) -> np.ndarray:
    """Neumaier summation along rows, adding terms in descending magnitude."""
    order = np.argsort(-np.abs(terms), axis=1, kind="stable")
    t = np.take_along_axis(terms, order, axis=1)
    total = t[:, 0].copy()
    comp = np.zeros_like(total)
    for j in range(1, t.shape[1]):
        x = t[:, j]
        new = total + x
        big = np.abs(total) >= np.abs(x)
        comp += np.where(big, (total - new) + x, (x - new) + total)
        total = new
    return total + comp


def c3_a_factor(sigma: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """prod|sigma_j| * sum_i (-1)**i K_i / (2d - i) * M**(2d - i), K_i = e_i(delta / |sigma|).

    Evaluated through w_j = M |sigma_j| / delta_j in [0, 1], using
    K_i * M**(2d-i) * prod|sigma_j| = prod(delta) * M**d * e_{d-i}(w), so that
    vanishing sigma_j need no special handling and nothing overflows.
    """
    d = delta.size
    abs_sigma = np.abs(sigma)
    with np.errstate(divide="ignore"):
        ratio = np.where(abs_sigma > 0, delta / abs_sigma, np.inf)
    big_m = np.min(ratio, axis=1)
    w = big_m[:, None] * abs_sigma / delta
    e = elementary_symmetric_batch(w)
    i = np.arange(d + 1)
    terms = (-1.0) ** i * e[:, d - i] / (2 * d - i)
    return float(np.prod(delta)) * big_m ** d * compensated_row_sum(terms)


def integrand_batch(family: Family, cfg: RootConfiguration, xs: np.ndarray, rs: np.ndarray,
                    alphas: np.ndarray) -> np.ndarray:
    """Root-coordinate integrand of the configuration probability, without its constant."""
    d = cfg.d
    delta = binomial_weights(d)
    sigma = sigma_batch(xs, rs, alphas)
    radial = np.prod(rs, axis=1) * vandermonde_batch(xs, rs, alphas)
    if family is Family.C1_GAUSSIAN_BETA:
        quad = np.sum((sigma / delta) ** 2, axis=1)
        return radial * quad ** (-d / 2.0)
    if family is Family.C2_UNIFORM_BETA:
        abs_sigma = np.abs(sigma)
        with np.errstate(divide="ignore"):
            ratio = np.where(abs_sigma > 0, delta / abs_sigma, np.inf)
        return radial * np.min(ratio, axis=1) ** d
    return radial * c3_a_factor(sigma, delta)


def config_constant(cfg: RootConfiguration, family: Family) -> float:
    """Combinatorial prefactor times the constant left by the analytic a-integration."""
    d, k = cfg.d, cfg.k
    log_delta = sum(math.log(comb) for comb in binomial_weights(d))
    log_perm = math.lgamma(cfg.m + 1) + math.lgamma(k + 1) + math.lgamma(cfg.negatives + 1)
    if family is Family.C1_GAUSSIAN_BETA:
        return math.exp(k * math.log(2) - log_perm + gammaln(d / 2.0)
                        - (d / 2.0) * math.log(math.pi) - log_delta)
    if family is Family.C2_UNIFORM_BETA:
        return math.exp((k + 1 - d) * math.log(2) - math.log(d) - log_perm - log_delta)
    return (-1) ** d * math.exp((k + 1) * math.log(2) - log_perm - 2 * log_delta)


# ---------------------------------------------------------------- point API

def symmetric_functions(p: MixedRootPoint) -> tuple[float, ...]:
    return tuple(float(v) for v in sigma_batch(*p.arrays())[0])


def vandermonde_abs(p: MixedRootPoint) -> float:
    return float(vandermonde_batch(*p.arrays())[0])


def integrand(cfg: RootConfiguration, spec: DistributionSpec, p: MixedRootPoint) -> float:
    if not p.fits(cfg):
        raise ValueError("point does not match the root configuration")
    with np.errstate(all="ignore"):
        value = float(integrand_batch(spec.family, cfg, *p.arrays())[0])
    if not math.isfinite(value):
        raise NumericOverflow(f"integrand is not finite at {p}")
    return value


# ---------------------------------------------------------------- integration

def map_unit_cube(cfg: RootConfiguration, u: np.ndarray):
    """Map points of [0, 1)**n to root coordinates; returns (xs, rs, alphas, jacobian)."""
    n_real = cfg.n - 2 * cfg.k
    t = u[:, :n_real]
    xs = t / (1.0 - t)
    xs[:, cfg.m:] *= -1.0
    tr = u[:, n_real:n_real + cfg.k]
    rs = tr / (1.0 - tr)
    alphas = math.pi * u[:, n_real + cfg.k:]
    jac = np.prod(1.0 / (1.0 - t) ** 2, axis=1) * np.prod(1.0 / (1.0 - tr) ** 2, axis=1) \
        * math.pi ** cfg.k
    return xs, rs, alphas, jac


def _weighted_values(family: Family, cfg: RootConfiguration, u: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        xs, rs, alphas, jac = map_unit_cube(cfg, u)
        return integrand_batch(family, cfg, xs, rs, alphas) * jac


def _mc_shard(task: tuple) -> tuple[float, float, int, int]:
    family, cfg, seed, shard, size = task
    rng = block_rng(seed, 100 + family.stream_id, cfg.n, cfg.m, cfg.k, shard)
    f = _weighted_values(family, cfg, rng.random((size, cfg.n)))
    ok = np.isfinite(f)
    f = f[ok]
    return float(np.sum(f)), float(np.sum(f * f)), int(f.size), int(np.count_nonzero(~ok))


def _sobol_replicate(task: tuple) -> tuple[float, int, int]:
    family, cfg, seed, rep, log2_points = task
    rng = block_rng(seed, 200 + family.stream_id, cfg.n, cfg.m, cfg.k, rep)
    u = qmc.Sobol(cfg.n, scramble=True, seed=rng).random_base2(log2_points)
    f = _weighted_values(family, cfg, u)
    ok = np.isfinite(f)
    return float(np.mean(f[ok])), int(np.count_nonzero(ok)), int(np.count_nonzero(~ok))


def default_points(d: int) -> int:
    return 10**6 if d <= 3 else 10**7


def p_config(cfg: RootConfiguration, spec: DistributionSpec, n_points: int | None = None,
             seed: int = 0, sampler: str = "mc", threads: int | None = None) -> IntegralEstimate:
    """Probability that the game polynomial has the root configuration ``cfg``.

    ``spec.scale`` is never read: the probability does not depend on it.
    """
    n_points = default_points(cfg.d) if n_points is None else int(n_points)
    if n_points < 1000:
        raise ValueError("n_points must be >= 1000")
    if sampler not in SAMPLERS:
        raise ValueError(f"sampler must be one of {SAMPLERS}")
    family = spec.family
    const = config_constant(cfg, family)
    threads = resolve_threads(threads)

    if sampler == "mc":
        tasks = [(family, cfg, seed, s, min(SHARD_SIZE, n_points - start))
                 for s, start in enumerate(range(0, n_points, SHARD_SIZE))]
        parts = run_blocks(_mc_shard, tasks, threads)
        total = math.fsum(p[0] for p in parts)
        total_sq = math.fsum(p[1] for p in parts)
        count = sum(p[2] for p in parts)
        discarded = sum(p[3] for p in parts)
        mean = total / count
        var = max(total_sq / count - mean * mean, 0.0)
        value, stderr = const * mean, abs(const) * math.sqrt(var / count)
    else:
        log2_points = max(int(math.log2(n_points / SOBOL_REPLICATES)), 4)
        tasks = [(family, cfg, seed, r, log2_points) for r in range(SOBOL_REPLICATES)]
        parts = run_blocks(_sobol_replicate, tasks, threads)
        means = np.array([p[0] for p in parts])
        count = sum(p[1] for p in parts)
        discarded = sum(p[2] for p in parts)
        value = const * float(np.mean(means))
        stderr = abs(const) * float(np.std(means, ddof=1)) / math.sqrt(SOBOL_REPLICATES)

    if discarded:
        log.warning("discarded %d non-finite integrand values for %s", discarded, cfg)
    insufficient = stderr > abs(value) / 10
    if insufficient:
        log.warning("p_config %s: stderr %.3g exceeds a tenth of the value %.3g", cfg, stderr, value)
    return IntegralEstimate(value=value, stderr=stderr, n_points=count + discarded,
                            n_discarded=discarded, insufficient=insufficient)


def p_m_closed(d: int, m: int, spec: DistributionSpec, n_points: int | None = None, seed: int = 0,
               sampler: str = "mc", threads: int | None = None) -> IntegralEstimate:
    """Probability of exactly m internal equilibria: the sum over complex-pair counts k."""
    return _sum_terms(_terms(d, m, spec, n_points, seed, sampler, threads))


def _terms(d, m, spec, n_points, seed, sampler, threads) -> list[tuple[RootConfiguration, IntegralEstimate]]:
    if d < 2:
        raise DomainError("d must be >= 2")
    if not 0 <= m <= d - 1:
        raise DomainError(f"m={m} outside [0, {d - 1}]")
    n = d - 1
    return [(cfg, p_config(cfg, spec, n_points, seed, sampler, threads))
            for cfg in (RootConfiguration(n, m, k) for k in range((n - m) // 2 + 1))]


def _sum_terms(terms) -> IntegralEstimate:
    ests = [e for _, e in terms]
    stderr = math.sqrt(math.fsum(e.stderr ** 2 for e in ests))
    value = math.fsum(e.value for e in ests)
    return IntegralEstimate(value=value, stderr=stderr, n_points=sum(e.n_points for e in ests),
                            n_discarded=sum(e.n_discarded for e in ests),
                            insufficient=stderr > abs(value) / 10)


def distribution_closed(d: int, spec: DistributionSpec, n_points: int | None = None, seed: int = 0,
                        sampler: str = "mc", threads: int | None = None) -> EquilibriumDistribution:
    """Distribution of the equilibrium count from the configuration integrals.

    p[1..d-1] are integrated directly; p[0] is reported as the complement
    1 - sum(p[1:]), with the directly integrated value and the discrepancy in ``extra``.
    """
    all_terms = {m: _terms(d, m, spec, n_points, seed, sampler, threads) for m in range(d)}
    totals = {m: _sum_terms(t) for m, t in all_terms.items()}
    upper = [totals[m] for m in range(1, d)]
    p0 = 1.0 - math.fsum(e.value for e in upper)
    p0_err = math.sqrt(math.fsum(e.stderr ** 2 for e in upper))
    p = [p0] + [e.value for e in upper]
    stderr = [p0_err] + [e.stderr for e in upper]
    terms = [{"m": cfg.m, "k": cfg.k, "negatives": cfg.negatives, "value": e.value,
              "stderr": e.stderr, "n_points": e.n_points, "n_discarded": e.n_discarded,
              "insufficient": e.insufficient}
             for m in range(d) for cfg, e in all_terms[m]]
    n_total = sum(t["n_points"] for t in terms)
    n_discarded = sum(t["n_discarded"] for t in terms)
    return EquilibriumDistribution(
        d=d, p=tuple(p), stderr=tuple(stderr), method="closed-form",
        extra={"family": spec.family.value, "seed": seed, "sampler": sampler,
               "n_points": n_points if n_points is not None else default_points(d),
               "terms": terms, "p0_direct": totals[0].value, "p0_direct_stderr": totals[0].stderr,
               "p0_discrepancy": totals[0].value - p0,
               "discarded_fraction": n_discarded / n_total if n_total else 0.0},
    )
