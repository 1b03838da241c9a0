"""Sign changes in random coefficient sequences and the resulting Descartes bounds.

``p_{k,n}`` is the probability that n + 1 independent coefficients, each positive
with probability alpha, show exactly k sign changes. By Descartes' rule the
number of positive roots of the game polynomial is bounded by, and has the
parity of, the number of sign changes of its coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, TooLarge

ORACLE_MAX_N = 24
DELTA = 0.98
# below this |1 - 2 alpha| the general p_{1,n} branch loses digits to cancellation
P1_SERIES_BAND = 1e-6
TABLE_METHODS = ("symmetric", "initial", "recursive", "explicit", "oracle")


@dataclass(frozen=True)
class SignBias:
    alpha: float = 0.5

    def __post_init__(self):
        a = float(self.alpha)
        if not 0.0 <= a <= 1.0:
            raise DomainError(f"alpha={self.alpha} outside [0, 1]")
        object.__setattr__(self, "alpha", a)

    @property
    def symmetric(self) -> bool:
        return self.alpha == 0.5


def _alpha(alpha: float | SignBias) -> float:
    return alpha.alpha if isinstance(alpha, SignBias) else SignBias(alpha).alpha


def _check_kn(k: int, n: int):
    if n < 0 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got k={k}, n={n}")


@dataclass(frozen=True)
class SignChangeTable:
    """``entries[n][k] = p_{k,n}`` for 0 <= k <= n <= n_max."""

    n_max: int
    entries: tuple[tuple[float, ...], ...]
    alpha: SignBias
    method: str

    def __post_init__(self):
        if self.method not in TABLE_METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if len(self.entries) != self.n_max + 1:
            raise ValueError("entries must have n_max + 1 rows")
        for n, row in enumerate(self.entries):
            if len(row) != n + 1:
                raise ValueError(f"row {n} must have {n + 1} entries")

    def __getitem__(self, kn: tuple[int, int]) -> float:
        k, n = kn
        return self.entries[n][k] if 0 <= k <= n <= self.n_max else 0.0

    def row(self, n: int) -> tuple[float, ...]:
        return self.entries[n]


# ---------------------------------------------------------------- p_{k,n}

def p_kn_symmetric(k: int, n: int) -> float:
    _check_kn(k, n)
    return math.comb(n, k) / 2**n


def _p1_general(a: float, n: int) -> float:
    b = 1.0 - a
    if abs(1.0 - 2.0 * a) < P1_SERIES_BAND:
        return 2 * a * b * math.fsum(b**j * a ** (n - 1 - j) for j in range(n))
    return 2 * a * b * (b**n - a**n) / (1.0 - 2.0 * a)


def p_kn_initial(alpha: float | SignBias, n: int, k: int) -> float:
    """Closed forms for k in {0, 1, n-1, n}."""
    a = _alpha(alpha)
    if n < 1:
        raise DomainError("n must be >= 1")
    b, ab = 1.0 - a, a * (1.0 - a)
    if k == 0:
        return a ** (n + 1) + b ** (n + 1)
    if k == 1:
        return n / 2**n if a == 0.5 else _p1_general(a, n)
    if k == n:
        return ab ** (n / 2) if n % 2 == 0 else 2 * ab ** ((n + 1) / 2)
    if k == n - 1:
        if n % 2 == 0:
            return n * ab ** (n / 2)
        h = (n + 1) // 2
        # ab^h (h (a/b + b/a) + n - 1), expanded so tiny alpha cannot give 0 * inf
        return h * ab ** (h - 1) * (a * a + b * b) + (n - 1) * ab**h
    raise DomainError(f"no closed form for k={k} (need k in 0, 1, n-1, n)")


def p_kn_recursive(alpha: float | SignBias, n_max: int) -> SignChangeTable:
    """Table built from p_{0,0} = 1, the n = 1 row and
    p_{k,n} = a(1-a) (p_{k-2,n-2} - p_{k,n-2}) + p_{k,n-1}."""
    bias = SignBias(_alpha(alpha))
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    a = bias.alpha
    ab = a * (1.0 - a)
    p = np.zeros((n_max + 1, n_max + 3))  # p[n, k]; two spare zero columns
    p[0, 0] = 1.0
    if n_max >= 1:
        p[1, 0] = p_kn_initial(a, 1, 0)
        p[1, 1] = p_kn_initial(a, 1, 1)
    for n in range(2, n_max + 1):
        lag2 = np.zeros(n + 1)
        lag2[2:] = p[n - 2, : n - 1]
        p[n, : n + 1] = ab * (lag2 - p[n - 2, : n + 1]) + p[n - 1, : n + 1]
    entries = tuple(tuple(float(v) for v in p[n, : n + 1]) for n in range(n_max + 1))
    return SignChangeTable(n_max, entries, bias, "recursive")


def _multinomial(m: int, i: int, j: int, l: int) -> int:
    if min(i, j, l) < 0 or i + j + l != m:
        return 0
    return math.factorial(m) // (math.factorial(i) * math.factorial(j) * math.factorial(l))


def p_kn_explicit(alpha: float | SignBias, k: int, n: int) -> float:
    """Generating-function closed form, split by the parities of k and n."""
    a = _alpha(alpha)
    _check_kn(k, n)
    if a in (0.0, 1.0):
        return 1.0 if k == 0 else 0.0
    if a == 0.5:
        return p_kn_symmetric(k, n)
    ab = a * (1.0 - a)
    terms = []
    if k % 2 == 0:
        h = k // 2
        for m in range(math.ceil(n / 2), n + 1):
            c = _multinomial(m, h, n - h - m, 2 * m - n)
            if c:
                terms.append((n - k + 1) / (2 * m - n + 1) * c * (-1) ** (n - h - m) * ab ** (n - m))
        if n % 2 == 1:
            top = math.ceil((n - 1) / 2)
            terms.append(2 * math.comb(top, h) * (-1) ** (top - h + 1) * ab ** ((n + 1) / 2))
    else:
        h = (k - 1) // 2
        for m in range(math.ceil((n - 1) / 2), n + 1):
            c = _multinomial(m, h, n - h - m - 1, 2 * m - n + 1)
            if c:
                terms.append(2 * c * (-1) ** (n - h - m - 1) * ab ** (n - m))
    return math.fsum(terms)


@lru_cache(maxsize=None)
def _pattern_counts(n: int) -> np.ndarray:
    """counts[k, j]: sign patterns of length n + 1 with k changes and j positive entries."""
    length = n + 1
    counts = np.zeros((n + 1, length + 1), dtype=np.int64)
    total = 1 << length
    chunk = 1 << 20
    mask = (1 << n) - 1
    for start in range(0, total, chunk):
        x = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        changes = np.bitwise_count((x ^ (x >> np.uint64(1))) & np.uint64(mask)).astype(np.int64)
        pos = np.bitwise_count(x).astype(np.int64)
        np.add.at(counts, (changes, pos), 1)
    return counts


def p_kn_oracle(alpha: float | SignBias, k: int, n: int) -> float:
    """Brute-force enumeration of all 2**(n+1) sign patterns."""
    a = _alpha(alpha)
    _check_kn(k, n)
    if n > ORACLE_MAX_N:
        raise TooLarge(f"enumeration oracle limited to n <= {ORACLE_MAX_N}")
    row = _pattern_counts(n)[k]
    return math.fsum(int(c) * a**j * (1.0 - a) ** (n + 1 - j) for j, c in enumerate(row) if c)


def sign_change_table(alpha: float | SignBias, n_max: int, method: str = "recursive") -> SignChangeTable:
    """Full table by any single-entry method."""
    bias = SignBias(_alpha(alpha))
    if method == "recursive":
        return p_kn_recursive(bias, n_max)
    if method == "oracle" and n_max > ORACLE_MAX_N:
        raise TooLarge(f"enumeration oracle limited to n <= {ORACLE_MAX_N}")
    if method == "symmetric" and not bias.symmetric:
        raise DomainError("the symmetric formula requires alpha = 0.5")
    fn = {"symmetric": lambda k, n: p_kn_symmetric(k, n),
          "explicit": lambda k, n: p_kn_explicit(bias, k, n),
          "oracle": lambda k, n: p_kn_oracle(bias, k, n)}.get(method)
    if fn is None:
        raise ValueError(f"unknown method {method!r}")
    entries = tuple(tuple(fn(k, n) for k in range(n + 1)) for n in range(n_max + 1))
    return SignChangeTable(n_max, entries, bias, method)


# ---------------------------------------------------------------- binomial lemmas

def partial_binomial_sums(n: int, k: int) -> tuple[int, int]:
    """(sum over even j >= k, sum over odd j >= k) of C(n, j), exactly."""
    _check_kn(k, n)
    if n == 0:
        return 1, 0
    head = sum(math.comb(n, j) for j in range(n - k + 1))
    tail = (-1) ** k * (math.comb(n - 1, k - 1) if k >= 1 else 0)
    return (head + tail) // 2, (head - tail) // 2


def binary_entropy(s: float) -> float:
    if not 0.0 <= s <= 1.0:
        raise DomainError("entropy argument must lie in [0, 1]")
    if s in (0.0, 1.0):
        return 0.0
    return -s * math.log2(s) - (1 - s) * math.log2(1 - s)


@dataclass(frozen=True)
class EntropyBounds:
    """Bounds on sum_{j<=k} C(n, j); ``lovasz`` bounds sum_{j<k} C(n, j) when n is even and k <= n/2."""

    lower: float
    upper: float
    lovasz: float | None = None


def _low_regime(n: int, k: int) -> tuple[float, float]:
    h = 2.0 ** (n * binary_entropy(k / n))
    return h / math.sqrt(8 * k * (1 - k / n)), DELTA * h


def entropy_bounds(n: int, k: int) -> EntropyBounds:
    """Entropy bounds on the first k+1 binomial coefficients of row n.

    For k > n/2 the sum is 2**n minus the first n-k coefficients, bounded with
    the k <= n/2 estimate at j = n - k - 1. Sums with no non-trivial bound
    (k = 0, k = n, j = 0) are returned exactly.
    """
    _check_kn(k, n)
    lovasz = None
    if n % 2 == 0 and k <= n // 2:
        lovasz = 2.0 ** (n - 1) * math.comb(n, k) / math.comb(n, n // 2)
    if k == 0 or k == n:
        s = float(sum(math.comb(n, j) for j in range(k + 1)))
        return EntropyBounds(s, s, lovasz)
    if 2 * k <= n:
        lo, hi = _low_regime(n, k)
        return EntropyBounds(lo, hi, lovasz)
    j = n - k - 1
    if j == 0:
        s = float(2**n - 1)
        return EntropyBounds(s, s, lovasz)
    lo, hi = _low_regime(n, j)
    return EntropyBounds(2.0**n - hi, 2.0**n - lo, lovasz)


# ---------------------------------------------------------------- Descartes bounds

@dataclass(frozen=True)
class BoundSet:
    d: int
    alpha: SignBias
    upper: tuple[float, ...]
    lower_p0: float
    lower_p1: float
    upper_pd2: float
    upper_pd1: float

    def __post_init__(self):
        vals = (*self.upper, self.lower_p0, self.lower_p1, self.upper_pd2, self.upper_pd1)
        if any(not 0.0 <= v <= 1.0 for v in vals):
            raise ValueError("bounds must lie in [0, 1]")
        if len(self.upper) != self.d:
            raise ValueError("upper must have d entries")

    def lower(self, m: int) -> float:
        return {0: self.lower_p0, 1: self.lower_p1}.get(m, 0.0)


def _clamp(v: float) -> float:
    return min(max(v, 0.0), 1.0)


def symmetric_upper_bound(d: int, m: int) -> float:
    """Upper bound on p_m at alpha = 1/2 from the binomial identity, in exact integers."""
    if not 0 <= m <= d - 1:
        raise DomainError(f"m={m} outside [0, {d - 1}]")
    head = sum(math.comb(d - 1, j) for j in range(d - m))
    tail = math.comb(d - 2, m - 1) if m >= 1 else 0
    return (head + tail) / 2**d


def descartes_bounds(d: int, alpha: float | SignBias = 0.5) -> BoundSet:
    """Bounds on p_m implied by Descartes' rule of signs."""
    if d < 2:
        raise DomainError("d must be >= 2")
    bias = SignBias(_alpha(alpha))
    n = d - 1
    row = p_kn_recursive(bias, n).row(n)
    if bias.symmetric:
        upper = [symmetric_upper_bound(d, m) for m in range(d)]
    else:
        upper = [math.fsum(row[j] for j in range(m, d, 2)) for m in range(d)]
    a = bias.alpha
    return BoundSet(
        d=d, alpha=bias, upper=tuple(_clamp(v) for v in upper),
        lower_p0=_clamp(p_kn_initial(a, n, 0)), lower_p1=_clamp(p_kn_initial(a, n, 1)),
        upper_pd2=_clamp(p_kn_initial(a, n, n - 1)), upper_pd1=_clamp(p_kn_initial(a, n, n)),
    )
