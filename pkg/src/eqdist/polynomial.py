"""Real univariate polynomials and root counting by sign.

Coefficients are stored in ascending order: ``coeffs[i]`` multiplies ``y**i``.
Positive roots are counted exactly with a Sturm chain built on unit max-norm
rescaled remainders; :func:`tally_roots_eigen` is an independent check based on
companion-matrix eigenvalues.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import AllZero, EigenFailure, IllConditioned

ZERO_SNAP = 1e-12
IMAG_TOL = 1e-8
# a gcd candidate must divide p and p' to within this (unit max-norm) residual
GCD_CHECK = 1e-6
# the positive-root count must survive relative coefficient perturbations this large
COUNT_TOL = 1e-10


@dataclass(frozen=True)
class RealPolynomial:
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1] == 0.0:
            raise ValueError("use normalize() to build a RealPolynomial")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, y: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def __len__(self) -> int:
        return len(self.coeffs)

    def derivative(self) -> "RealPolynomial":
        if self.degree == 0:
            raise AllZero("derivative of a constant polynomial is zero")
        return RealPolynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def scaled(self, factor: float) -> "RealPolynomial":
        return normalize([factor * c for c in self.coeffs])


@dataclass(frozen=True)
class RootTally:
    positive: int
    negative: int
    complex_pairs: int
    counted_degree: int
    zero_root: bool = False

    def __post_init__(self):
        if min(self.positive, self.negative, self.complex_pairs) < 0:
            raise ValueError("root counts must be non-negative")
        total = self.positive + self.negative + 2 * self.complex_pairs + int(self.zero_root)
        if total != self.counted_degree:
            raise ValueError(f"tally {total} does not match counted degree {self.counted_degree}")


def normalize(coeffs: Sequence[float]) -> RealPolynomial:
    """Snap tiny coefficients to zero and drop the zero tail above the degree."""
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise AllZero("coefficients must be finite and non-empty")
    scale = np.max(np.abs(c))
    if scale == 0.0:
        raise AllZero("all coefficients are zero")
    c = np.where(np.abs(c) < ZERO_SNAP * scale, 0.0, c)
    top = int(np.flatnonzero(c)[-1])
    return RealPolynomial(tuple(float(v) for v in c[: top + 1]))


def sign_changes(coeffs: Sequence[float]) -> int:
    """Number of sign alternations among the nonzero coefficients."""
    signs = [1 if v > 0 else -1 for v in coeffs if v != 0]
    if not signs:
        raise AllZero("no nonzero coefficient")
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _unit(c: np.ndarray) -> np.ndarray:
    return c / np.max(np.abs(c))


def _remainder(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Raw remainder of a / b, both ascending with nonzero leading coefficients."""
    r = a.astype(float).copy()
    nb = len(b) - 1
    lead = b[-1]
    for shift in range(len(a) - 1 - nb, -1, -1):
        q = r[shift + nb] / lead
        r[shift : shift + nb + 1] -= q * b
        r[shift + nb] = 0.0
    return r[:nb] if nb > 0 else np.zeros(1)


def _quotient(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    r = a.astype(float).copy()
    nb = len(b) - 1
    q = np.zeros(len(a) - nb)
    for shift in range(len(a) - 1 - nb, -1, -1):
        q[shift] = r[shift + nb] / b[-1]
        r[shift : shift + nb + 1] -= q[shift] * b
    return q


def _strip(r: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(r)
    return r[: nz[-1] + 1] if nz.size else r[:0]


def _gcd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # remainders below the snap band (relative to the unit dividend) count as zero
    a, b = _unit(a), _unit(b)
    while len(b) > 1:
        r = _remainder(a, b)
        r = np.where(np.abs(r) < ZERO_SNAP, 0.0, r)
        r = _strip(r)
        if r.size == 0:
            return b
        a, b = b, _unit(r)
    return b


def square_free(p: RealPolynomial) -> RealPolynomial:
    """Return p / gcd(p, p'), which has the same roots, each simple."""
    if p.degree <= 1:
        return p
    c = np.array(p.coeffs)
    dc = np.array(p.derivative().coeffs)
    g = _gcd(c, dc)
    if len(g) == 1:
        return p
    # the float Euclidean step can return a spurious factor; a real one divides both
    if max(np.max(np.abs(_remainder(_unit(c), _unit(g)))),
           np.max(np.abs(_remainder(_unit(dc), _unit(g))))) > GCD_CHECK:
        return p
    g = g if g[-1] > 0 else -g
    return normalize(_quotient(c, g))


def _balance_exponent(lo: np.ndarray, hi: np.ndarray, span: int | np.ndarray) -> np.ndarray:
    # power-of-two estimate of the geometric-mean root modulus
    return np.round(np.log2(np.abs(lo / hi)) / span)


def balanced(p: RealPolynomial) -> RealPolynomial:
    """p(s y) for the power of two s nearest the geometric-mean root modulus.

    The substitution is exact and keeps the number of positive roots, but puts the
    roots near unit modulus so coefficient sizes in the Sturm chain are comparable.
    """
    c = np.array(p.coeffs)
    lo = int(np.flatnonzero(c)[0])
    if p.degree == lo:
        return p
    e = _balance_exponent(c[lo], c[-1], p.degree - lo)
    return normalize(np.ldexp(c, (e * np.arange(len(c))).astype(int)))


def sturm_chain(p: RealPolynomial, strict: bool = True) -> list[np.ndarray]:
    """Sturm chain of a square-free polynomial, each member rescaled to unit max-norm.

    Raises IllConditioned when a remainder's leading or lowest-order coefficient
    is nonzero but inside the zero-snap band, or when a whole remainder falls inside
    it before the chain reaches a constant. With ``strict=False`` small coefficients
    are snapped to zero and a vanishing remainder ends the chain.
    """
    chain = [_unit(np.array(p.coeffs))]
    if p.degree == 0:
        return chain
    chain.append(_unit(np.array(p.derivative().coeffs)))
    while len(chain[-1]) > 1:
        r = -_remainder(chain[-2], chain[-1])
        small = (np.abs(r) < ZERO_SNAP) & (r != 0.0)
        if np.all(np.abs(r) < ZERO_SNAP):
            if strict:
                raise IllConditioned("remainder vanished before a constant: not numerically square-free")
            break
        nz = np.flatnonzero(r)
        if strict and (small[nz[-1]] or small[nz[0]]):
            raise IllConditioned("Sturm remainder coefficient inside the zero-snap band")
        r = _strip(np.where(small, 0.0, r))
        chain.append(_unit(r))
    return chain


def _variations(signs: list[float]) -> int:
    s = [v for v in signs if v != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a * b < 0)


def _signs_at_zero_plus(chain: list[np.ndarray]) -> list[float]:
    return [float(np.sign(c[np.flatnonzero(c)[0]])) for c in chain]


def _signs_at_infinity(chain: list[np.ndarray]) -> list[float]:
    return [float(np.sign(c[-1])) for c in chain]


def _signs_at(chain: list[np.ndarray], y: float) -> list[float]:
    return [float(np.sign(np.polynomial.polynomial.polyval(y, c))) for c in chain]


def count_is_unstable(p: RealPolynomial, tol: float = COUNT_TOL) -> bool:
    """Whether coefficient perturbations of relative size tol could change the positive-root count.

    Each root z gets the first-order perturbation radius tol * sum|c_k||z|^k / |p'(z)|.
    The count is unstable if a disk contains 0, or two disks overlap and one of
    them reaches the half-line [0, inf), where roots could collide and leave or
    join the real axis. Exact roots at zero are factored out first.
    """
    c = np.array(balanced(p).coeffs)
    c = c[int(np.flatnonzero(c)[0]):]
    if len(c) < 2:
        return False
    z = _eigvals(c)
    with np.errstate(all="ignore"):
        rho = tol * P.polyval(np.abs(z), np.abs(c)) / np.abs(P.polyval(z, P.polyder(c)))
    rho = np.where(np.isfinite(rho), rho, np.inf)
    if np.any(np.abs(z) <= rho):
        return True
    reaches = np.where(z.real >= 0, np.abs(z.imag), np.abs(z)) <= rho
    overlap = np.abs(z[:, None] - z[None, :]) <= rho[:, None] + rho[None, :]
    np.fill_diagonal(overlap, False)
    return bool(np.any(overlap & (reaches[:, None] | reaches[None, :])))


def count_positive_roots(p: RealPolynomial, strict: bool = True) -> int:
    """Number of distinct real roots in (0, +inf), by Sturm's theorem.

    In strict mode IllConditioned is also raised when the count itself is not
    stable under tiny coefficient perturbations (see :func:`count_is_unstable`).
    ``strict=False`` returns the chain's answer even where it is ill-conditioned.
    """
    if p.degree == 0:
        return 0
    sf = square_free(p)
    chain = sturm_chain(balanced(sf), strict)
    n = _variations(_signs_at_zero_plus(chain)) - _variations(_signs_at_infinity(chain))
    if strict:
        try:
            unstable = count_is_unstable(sf)
        except EigenFailure:
            unstable = True
        if unstable:
            raise IllConditioned("positive-root count is not stable under coefficient perturbation")
    return n


def positive_root_intervals(p: RealPolynomial, max_iter: int = 100, width: float = 1e-12) -> list[float]:
    """Distinct positive roots of p, isolated with the Sturm chain and refined by bisection."""
    if p.degree == 0:
        return []
    sf = square_free(p)
    chain = sturm_chain(sf)
    n_pos = _variations(_signs_at_zero_plus(chain)) - _variations(_signs_at_infinity(chain))
    if n_pos == 0:
        return []
    c = np.array(sf.coeffs)
    bound = 1.0 + float(np.max(np.abs(c[:-1]) / abs(c[-1])))
    v_zero = _variations(_signs_at_zero_plus(chain))

    def v(y: float) -> int:
        return v_zero if y == 0.0 else _variations(_signs_at(chain, y))

    isolated: list[tuple[float, float]] = []
    stack = [(0.0, bound, n_pos)]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            isolated.append((lo, hi))
            continue
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            raise IllConditioned("could not separate clustered positive roots")
        n_left = v(lo) - v(mid)
        stack.append((lo, mid, n_left))
        stack.append((mid, hi, n - n_left))

    roots = []
    for lo, hi in sorted(isolated):
        # the root lies in (lo, hi]; sf changes sign across a simple root
        if sf(hi) == 0.0:
            roots.append(hi)
            continue
        s_hi = np.sign(sf(hi))
        for _ in range(max_iter):
            if hi - lo <= width * max(1.0, hi):
                break
            mid = 0.5 * (lo + hi)
            f_mid = sf(mid)
            if f_mid == 0.0:
                lo = hi = mid
                break
            if np.sign(f_mid) == s_hi:
                hi = mid
            else:
                lo = mid
        roots.append(0.5 * (lo + hi))
    return roots


def _eigvals(c: np.ndarray) -> np.ndarray:
    n = len(c) - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    companion = np.zeros((n, n))
    companion[1:, :-1] = np.eye(n - 1)
    companion[:, -1] = -c[:-1] / c[-1]
    try:
        return np.linalg.eigvals(companion)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc


def tally_roots_eigen(p: RealPolynomial, imag_tol: float = IMAG_TOL) -> RootTally:
    """Classify the roots of the square-free part of p from companion-matrix eigenvalues."""
    if p.degree < 1:
        raise ValueError("polynomial must have degree >= 1")
    sf = square_free(p)
    c = np.array(sf.coeffs)
    low = int(np.flatnonzero(c)[0])
    zero_root = low > 0
    z = _eigvals(c[low:])
    if not np.all(np.isfinite(z)):
        raise EigenFailure("non-finite eigenvalue")
    is_real = np.abs(z.imag) <= imag_tol * np.abs(z)
    n_complex = int(np.count_nonzero(~is_real))
    if n_complex % 2:
        raise EigenFailure("unpaired complex eigenvalue")
    return RootTally(
        positive=int(np.count_nonzero(is_real & (z.real > 0))),
        negative=int(np.count_nonzero(is_real & (z.real < 0))),
        complex_pairs=n_complex // 2,
        counted_degree=sf.degree,
        zero_root=zero_root,
    )


def count_positive_roots_robust(p: RealPolynomial) -> int:
    """Sturm count, falling back to the eigenvalue tally when the chain is ill-conditioned."""
    try:
        return count_positive_roots(p)
    except IllConditioned:
        return tally_roots_eigen(p).positive


def positive_roots_eigen(p: RealPolynomial, imag_tol: float = IMAG_TOL, newton_steps: int = 4) -> list[float]:
    """Distinct positive roots from companion eigenvalues, polished by Newton steps."""
    if p.degree == 0:
        return []
    sf = square_free(p)
    c = np.array(sf.coeffs)
    z = _eigvals(c[int(np.flatnonzero(c)[0]):])
    y = np.sort(z.real[(np.abs(z.imag) <= imag_tol * np.abs(z)) & (z.real > 0)])
    dc = np.array(sf.derivative().coeffs) if sf.degree > 0 else np.zeros(1)
    for _ in range(newton_steps):
        f = np.polynomial.polynomial.polyval(y, c)
        df = np.polynomial.polynomial.polyval(y, dc)
        step = np.where(df != 0, f / np.where(df != 0, df, 1.0), 0.0)
        y = np.where(np.abs(step) < 0.5 * y, y - step, y)
    return [float(v) for v in y]


def positive_roots_with_multiplicity(p: RealPolynomial, cluster_tol: float = 1e-4,
                                     imag_tol: float = 1e-3) -> int:
    """Positive real roots of p (not square-free) counted with multiplicity.

    Eigenvalues of a root of multiplicity m scatter by about eps**(1/m), so the
    tolerances here are loose. Intended for small exact-coefficient test polynomials.
    """
    z = _eigvals(np.array(p.coeffs))
    real = z[np.abs(z.imag) <= imag_tol * np.maximum(np.abs(z), 1.0)].real
    return int(np.count_nonzero(real > cluster_tol))


def count_positive_roots_batch(coeffs: np.ndarray) -> tuple[np.ndarray, int]:
    """Positive-root counts for a batch of polynomials sharing one coefficient length.

    ``coeffs`` has shape (N, L), ascending order per row. Rows whose Sturm chain
    has the generic shape (each remainder exactly one degree lower, no coefficient
    near the snap band at either end) are counted in a vectorized pass; the rest go
    through :func:`count_positive_roots`, falling back to the eigenvalue oracle on
    IllConditioned. All-zero rows get count -1; rows where the eigenvalue
    fallback itself fails get -2.

    Returns (counts, n_eigen_fallback).
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 2:
        raise ValueError("coeffs must be a 2-D array")
    n_rows, length = c.shape
    counts = np.full(n_rows, -1, dtype=np.int64)
    if n_rows == 0:
        return counts, 0
    scale = np.max(np.abs(c), axis=1)
    finite = np.all(np.isfinite(c), axis=1)
    safe_scale = np.where(scale > 0, scale, 1.0)
    slow = ~finite | (scale == 0) | (np.abs(c[:, -1]) < ZERO_SNAP * safe_scale) \
        | (np.abs(c[:, 0]) < ZERO_SNAP * safe_scale)
    if length == 1:
        counts[~slow] = 0
    else:
        fast = np.flatnonzero(~slow)
        e = _balance_exponent(c[fast, 0], c[fast, -1], length - 1)
        rows = np.ldexp(c[fast], (e[:, None] * np.arange(length)).astype(int))
        with np.errstate(all="ignore"):
            got, bad = _batch_sturm(rows / np.max(np.abs(rows), axis=1, keepdims=True))
        counts[fast[~bad]] = got[~bad]
        slow[fast[bad]] = True

    n_fallback = 0
    for i in np.flatnonzero(slow):
        if not finite[i] or scale[i] == 0:
            continue
        try:
            p = normalize(c[i])
        except AllZero:
            continue
        try:
            counts[i] = count_positive_roots(p)
        except IllConditioned:
            n_fallback += 1
            try:
                counts[i] = tally_roots_eigen(p).positive
            except EigenFailure:
                counts[i] = -2
    return counts, n_fallback


def _batch_sturm(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n_rows, length = p.shape
    deriv = p[:, 1:] * np.arange(1, length)
    a = p / np.max(np.abs(p), axis=1, keepdims=True)
    b = deriv / np.max(np.abs(deriv), axis=1, keepdims=True)
    bad = np.zeros(n_rows, dtype=bool)
    leads = [a[:, -1], b[:, -1]]
    lows = [a[:, 0], b[:, 0]]
    while b.shape[1] > 1:
        q1 = a[:, -1] / b[:, -1]
        a1 = a[:, :-1].copy()
        a1[:, 1:] -= q1[:, None] * b[:, :-1]
        q0 = a1[:, -1] / b[:, -1]
        r = -(a1[:, :-1] - q0[:, None] * b[:, :-1])
        r_scale = np.max(np.abs(r), axis=1)
        bad |= ~(r_scale >= ZERO_SNAP)
        r = r / np.where(r_scale > 0, r_scale, 1.0)[:, None]
        bad |= ~(np.abs(r[:, -1]) >= ZERO_SNAP) | ~(np.abs(r[:, 0]) >= ZERO_SNAP)
        leads.append(r[:, -1])
        lows.append(r[:, 0])
        a, b = b, r
    at_inf = np.sign(np.stack(leads, axis=1))
    at_zero = np.sign(np.stack(lows, axis=1))

    def variations(s: np.ndarray) -> np.ndarray:
        return np.count_nonzero(s[:, 1:] * s[:, :-1] < 0, axis=1)

    return variations(at_zero) - variations(at_inf), bad
