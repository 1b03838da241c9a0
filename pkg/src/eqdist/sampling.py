"""Random games and Monte Carlo estimates of the equilibrium-count distribution."""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import Degenerate
from .game import GapVector, binomial_weights
from .polynomial import count_positive_roots_batch

BLOCK_SIZE = 1 << 16
GENERATOR_NAME = "numpy.random.Philox(SeedSequence(seed, spawn_key=(stream..., block)))"


class Family(str, enum.Enum):
    C1_GAUSSIAN_BETA = "C1_gaussian_beta"
    C2_UNIFORM_BETA = "C2_uniform_beta"
    C3_UNIFORM_PAYOFFS = "C3_uniform_payoffs"

    @property
    def cli_name(self) -> str:
        return _CLI_NAMES[self]

    @classmethod
    def parse(cls, name: str) -> "Family":
        for fam, alias in _CLI_NAMES.items():
            if name in (fam.value, alias, fam.name):
                return fam
        raise ValueError(f"unknown distribution family {name!r}")

    @property
    def stream_id(self) -> int:
        return list(Family).index(self)


_CLI_NAMES = {
    Family.C1_GAUSSIAN_BETA: "gaussian",
    Family.C2_UNIFORM_BETA: "uniform-beta",
    Family.C3_UNIFORM_PAYOFFS: "uniform-payoffs",
}


@dataclass(frozen=True)
class DistributionSpec:
    """Distribution of the payoff gaps.

    ``scale`` is the standard deviation of beta for C1 and the half-width of the
    uniform law (of beta for C2, of each payoff for C3).
    """

    family: Family = Family.C1_GAUSSIAN_BETA
    scale: float = 1.0

    def __post_init__(self):
        if not isinstance(self.family, Family):
            object.__setattr__(self, "family", Family.parse(self.family))
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("scale must be a positive finite number")

    @property
    def sign_probability(self) -> float:
        """P(beta_k > 0); every supported family is symmetric about zero."""
        return 0.5


METHODS = ("sampling", "closed-form", "bounds", "approximation")


@dataclass(frozen=True)
class EquilibriumDistribution:
    """Probabilities ``p[m]`` of m internal equilibria, m = 0..d-1."""

    d: int
    p: tuple[float, ...]
    stderr: tuple[float, ...]
    method: str
    n_samples: int = 0
    n_degenerate: int = 0
    extra: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        object.__setattr__(self, "stderr", tuple(float(v) for v in self.stderr))
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if len(self.p) != self.d or len(self.stderr) != self.d:
            raise ValueError("p and stderr must have length d")
        if any(v < 0 for v in self.stderr):
            raise ValueError("stderr entries must be non-negative")
        if self.method in ("sampling", "closed-form"):
            if any(not (-1e-12 <= v <= 1 + 1e-12) for v in self.p):
                raise ValueError(f"probabilities outside [0, 1]: {self.p}")
            if abs(math.fsum(self.p) - 1.0) > 1e-9:
                raise ValueError(f"probabilities sum to {math.fsum(self.p)}, not 1")

    @property
    def expected(self) -> float:
        return expected_count(self.p)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["p"], out["stderr"] = list(self.p), list(self.stderr)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EquilibriumDistribution":
        return cls(**{**data, "p": tuple(data["p"]), "stderr": tuple(data["stderr"])})


def expected_count(p: Sequence[float]) -> float:
    return math.fsum(m * pm for m, pm in enumerate(p))


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else $EQDIST_THREADS, else all cores."""
    if threads is None:
        env = os.environ.get("EQDIST_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return threads


def block_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent counter-based stream for a (seed, key...) tuple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def run_blocks(fn: Callable, tasks: Iterable[tuple], threads: int) -> list:
    """Apply fn to each task, in order; results never depend on ``threads``."""
    tasks = list(tasks)
    if threads == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def draw_gaps(spec: DistributionSpec, d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Array of shape (size, d) of gap vectors drawn from ``spec``."""
    s = spec.scale
    if spec.family is Family.C1_GAUSSIAN_BETA:
        return s * rng.standard_normal((size, d))
    if spec.family is Family.C2_UNIFORM_BETA:
        return rng.uniform(-s, s, (size, d))
    a = rng.uniform(-s, s, (size, d))
    b = rng.uniform(-s, s, (size, d))
    return a - b


def sample_gaps(spec: DistributionSpec, d: int, rng: np.random.Generator) -> GapVector:
    if d < 2:
        raise ValueError("d must be >= 2")
    return GapVector(draw_gaps(spec, d, 1, rng)[0])


def count_equilibria_batch(beta: np.ndarray) -> tuple[np.ndarray, int]:
    """Internal-equilibrium counts for rows of gap vectors.

    -1 marks degenerate (all-zero) games, -2 a numeric failure of the root oracle.
    """
    beta = np.asarray(beta, dtype=float)
    return count_positive_roots_batch(beta * binomial_weights(beta.shape[1]))


def _tally_block(task: tuple) -> tuple[np.ndarray, int, int, int]:
    spec, d, seed, block, size = task
    rng = block_rng(seed, spec.family.stream_id, d, block)
    counts, n_fallback = count_equilibria_batch(draw_gaps(spec, d, size, rng))
    valid = counts >= 0
    return (np.bincount(counts[valid], minlength=d), int(np.count_nonzero(counts == -1)),
            n_fallback, int(np.count_nonzero(counts == -2)))


def estimate_distribution(spec: DistributionSpec, d: int, n: int, seed: int,
                          threads: int | None = None) -> EquilibriumDistribution:
    """Empirical distribution of the equilibrium count over ``n`` sampled games.

    Samples are generated in fixed blocks of ``BLOCK_SIZE``; block b draws from
    its own stream keyed by (seed, family, d, b), so the result is bit-identical
    for any worker count.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    tasks = [(spec, d, seed, b, min(BLOCK_SIZE, n - start))
             for b, start in enumerate(range(0, n, BLOCK_SIZE))]
    results = run_blocks(_tally_block, tasks, resolve_threads(threads))
    tally = np.zeros(d, dtype=np.int64)
    n_deg = n_fallback = n_failed = 0
    for counts, deg, fb, failed in results:
        tally += counts
        n_deg += deg
        n_fallback += fb
        n_failed += failed
    n_eff = int(tally.sum())
    if n_eff == 0:
        raise Degenerate("no sampled game had a countable polynomial")
    p = tally / n_eff
    stderr = np.sqrt(p * (1.0 - p) / n_eff)
    return EquilibriumDistribution(
        d=d, p=tuple(p), stderr=tuple(stderr), method="sampling", n_samples=n, n_degenerate=n_deg,
        extra={"family": spec.family.value, "scale": spec.scale, "seed": seed,
               "generator": GENERATOR_NAME, "block_size": BLOCK_SIZE,
               "counts": [int(v) for v in tally], "n_eigen_fallback": n_fallback,
               "n_failed": n_failed},
    )


def estimate_moments(spec: DistributionSpec, d: int, n: int, seed: int,
                     threads: int | None = None) -> tuple[float, float]:
    """Expected number of internal equilibria E and of stable ones, SE = E / 2."""
    e = estimate_distribution(spec, d, n, seed, threads).expected
    return e, e / 2.0
