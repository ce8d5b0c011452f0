"""Exact integer/rational arithmetic helpers: permanents and linear solves.

Python's ``int`` and :class:`fractions.Fraction` already provide the
arbitrary-precision integers and reduced rationals everything else is built on.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_RYSER_CAP = 30
NAIVE_CAP = 10

# Inner subset tables are 2**_INNER_BITS rows of int64.
_INNER_BITS = 14
_PRIME_CEILING = 2**31


class DimensionCapExceeded(ValueError):
    """Raised when a matrix is too large for the requested algorithm."""

    def __init__(self, n: int, cap: int, what: str):
        super().__init__(f"{what}: dimension {n} exceeds cap {cap}")
        self.n = n
        self.cap = cap


def ryser_cap() -> int:
    """Default Ryser dimension cap, overridable with ``QUASIEQ_RYSER_CAP``."""
    value = os.environ.get("QUASIEQ_RYSER_CAP")
    return int(value) if value else DEFAULT_RYSER_CAP


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError("factorial of a negative number")
    return math.factorial(n)


def _square_int_rows(m: Sequence[Sequence[int]]) -> list[list[int]]:
    rows = [list(r) for r in m]
    n = len(rows)
    for r in rows:
        if len(r) != n:
            raise ValueError("matrix is not square")
        for x in r:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                raise TypeError(f"permanent expects integer entries, got {x!r}")
    return [[int(x) for x in r] for r in rows]


def permanent_naive(m: Sequence[Sequence[int]], cap: int = NAIVE_CAP) -> int:
    """Sum of prod_j m[j][pi(j)] over every permutation pi."""
    rows = _square_int_rows(m)
    n = len(rows)
    if n > cap:
        raise DimensionCapExceeded(n, cap, "permanent_naive")
    # walk permutations row by row; a zero entry prunes every completion of the prefix
    def expand(j: int, used: int) -> int:
        if j == n:
            return 1
        total = 0
        for k, x in enumerate(rows[j]):
            if x and not used >> k & 1:
                total += x * expand(j + 1, used | 1 << k)
        return total

    return expand(0, 0)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def _primes_below(ceiling: int):
    p = ceiling - 1
    while p > 2:
        if _is_prime(p):
            yield p
        p -= 1


_PRIMES: list[int] = []


def _prime(i: int) -> int:
    """The i-th largest prime below 2**31 (cached)."""
    while len(_PRIMES) <= i:
        start = _PRIMES[-1] if _PRIMES else _PRIME_CEILING
        _PRIMES.append(next(_primes_below(start)))
    return _PRIMES[i]


def _moduli_for(bound: int) -> list[int]:
    """Primes whose product exceeds 2*bound, enough to recover a signed value."""
    chosen = []
    product = 1
    while product <= 2 * bound:
        p = _prime(len(chosen))
        chosen.append(p)
        product *= p
    return chosen


def _crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    x, mod = 0, 1
    for r, p in zip(residues, moduli):
        # solve x + mod*t = r (mod p)
        t = ((r - x) * pow(mod, -1, p)) % p
        x += mod * t
        mod *= p
    if x > mod // 2:
        x -= mod
    return x


def _gray_bit(k: int) -> int:
    """Index of the bit flipped between Gray codes k-1 and k (k >= 1)."""
    return (k & -k).bit_length() - 1


def _ryser_range_mod(cols_mod: np.ndarray, inner_table: np.ndarray,
                     inner_sign: np.ndarray, n_inner: int,
                     start: int, stop: int, p: int) -> int:
    """Sum over outer Gray codes start..stop-1 for one prime."""
    n = cols_mod.shape[1]
    n_outer_cols = cols_mod.shape[0] - n_inner
    gray = start ^ (start >> 1)
    base = np.zeros(n, dtype=np.int64)
    parity = 0
    for b in range(n_outer_cols):
        if gray >> b & 1:
            base = (base + cols_mod[n_inner + b]) % p
            parity ^= 1
    total = 0
    for k in range(start, stop):
        if k > start:
            bit = _gray_bit(k)
            if (k ^ (k >> 1)) >> bit & 1:
                base = (base + cols_mod[n_inner + bit]) % p
            else:
                base = (base - cols_mod[n_inner + bit]) % p
            parity ^= 1
        sums = (inner_table + base) % p
        prod = sums[:, 0].copy()
        for r in range(1, n):
            prod = (prod * sums[:, r]) % p
        signed = prod * (inner_sign if parity == 0 else -inner_sign)
        total = (total + int(signed.sum() % p)) % p
    return total


def permanent_ryser(m: Sequence[Sequence[int]], cap: int | None = None,
                    workers: int = 1) -> int:
    """Exact permanent by Ryser inclusion-exclusion.

    per(A) = (-1)^n sum_{S subset of columns} (-1)^|S| prod_i sum_{j in S} a_ij

    Column subsets are split into low "inner" bits, tabulated once with numpy,
    and high "outer" bits walked in Gray-code order so each step changes the
    row-sum vector by a single column. Arithmetic is done modulo word-sized
    primes and reassembled by CRT against the Hadamard-style bound
    prod_i sum_j |a_ij|, so the result is exact. ``workers`` splits the outer
    range into chunks; chunk sums are added mod p, so the result does not
    depend on the split.
    """
    rows = _square_int_rows(m)
    n = len(rows)
    if cap is None:
        cap = ryser_cap()
    if n > cap:
        raise DimensionCapExceeded(n, cap, "permanent_ryser")
    if n == 0:
        return 1
    bound = 1
    for r in rows:
        bound *= sum(abs(x) for x in r)
    if bound == 0:
        return 0

    n_inner = min(n, _INNER_BITS)
    n_outer = 1 << (n - n_inner)
    # columns as rows of a (n_cols, n_rows) array
    columns = [[rows[i][j] for i in range(n)] for j in range(n)]

    residues = []
    moduli = _moduli_for(bound)
    for p in moduli:
        cols_mod = np.array([[x % p for x in c] for c in columns], dtype=np.int64)
        table = np.zeros((1, n), dtype=np.int64)
        sign = np.ones(1, dtype=np.int64)
        for j in range(n_inner):
            table = np.concatenate([table, (table + cols_mod[j]) % p])
            sign = np.concatenate([sign, -sign])
        # (-1)^n overall
        if n % 2:
            sign = -sign
        chunks = max(1, min(workers, n_outer))
        bounds = [n_outer * c // chunks for c in range(chunks + 1)]
        ranges = list(zip(bounds[:-1], bounds[1:]))
        args = (cols_mod, table, sign, n_inner)
        if chunks == 1:
            parts = [_ryser_range_mod(*args, a, b, p) for a, b in ranges]
        else:
            with ThreadPoolExecutor(max_workers=chunks) as pool:
                parts = list(pool.map(lambda ab: _ryser_range_mod(*args, ab[0], ab[1], p),
                                      ranges))
        residues.append(sum(parts) % p)
    return _crt(residues, moduli)


class RationalMatrix:
    """Dense row-major matrix of Fractions."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(entries)
        if any(isinstance(x, float) for x in entries):
            raise TypeError("floats are not exact; pass ints, Fractions or 'p/q' strings")
        entries = tuple(Fraction(x) for x in entries)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self._entries = entries

    @classmethod
    def from_rows(cls, data: Sequence[Sequence], cols: int | None = None) -> "RationalMatrix":
        data = [list(r) for r in data]
        if cols is None:
            cols = len(data[0]) if data else 0
        for r in data:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(data), cols, (x for r in data for x in r))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def matvec(self, x: Sequence) -> list[Fraction]:
        if len(x) != self.cols:
            raise ValueError("dimension mismatch")
        return [sum((a * Fraction(b) for a, b in zip(self.row(i), x)), Fraction(0))
                for i in range(self.rows)]

    def __eq__(self, other) -> bool:
        return (isinstance(other, RationalMatrix) and self.rows == other.rows
                and self.cols == other.cols and self._entries == other._entries)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._entries))

    def __repr__(self) -> str:
        return f"RationalMatrix({self.to_rows()!r})"


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of :func:`solve_linear_exact`.

    ``status`` is ``"unique"``, ``"inconsistent"`` or ``"underdetermined"``.
    For underdetermined systems ``solution`` is a particular solution with the
    free variables set to zero; for inconsistent ones it is ``None``.
    """

    status: str
    rank: int
    solution: tuple[Fraction, ...] | None
    free_variables: tuple[int, ...] = ()

    @property
    def unique(self) -> bool:
        return self.status == "unique"


def _eliminate(a: RationalMatrix, b: Sequence | None):
    """Gaussian elimination with full pivoting.

    Returns (reduced rows, rhs, pivot columns in elimination order, rank).
    """
    m = a.to_rows()
    rhs = [Fraction(x) for x in b] if b is not None else [Fraction(0)] * a.rows
    nrows, ncols = a.rows, a.cols
    col_order = list(range(ncols))
    rank = 0
    for step in range(min(nrows, ncols)):
        best = None
        for i in range(step, nrows):
            for jj in range(step, ncols):
                v = m[i][col_order[jj]]
                if v != 0 and (best is None or abs(v) > abs(best[0])):
                    best = (v, i, jj)
        if best is None:
            break
        _, pi, pj = best
        m[step], m[pi] = m[pi], m[step]
        rhs[step], rhs[pi] = rhs[pi], rhs[step]
        col_order[step], col_order[pj] = col_order[pj], col_order[step]
        pc = col_order[step]
        pivot = m[step][pc]
        for i in range(nrows):
            if i == step or m[i][pc] == 0:
                continue
            factor = m[i][pc] / pivot
            ri, rs = m[i], m[step]
            for c in range(ncols):
                if rs[c]:
                    ri[c] -= factor * rs[c]
            rhs[i] -= factor * rhs[step]
        rank += 1
    return m, rhs, col_order, rank


def rank(a: RationalMatrix) -> int:
    return _eliminate(a, None)[3]


def solve_linear_exact(a: RationalMatrix, b: Sequence) -> LinearSolution:
    """Solve ``a x = b`` exactly and classify the solution set."""
    if a.rows != len(b):
        raise ValueError(f"matrix has {a.rows} rows but rhs has {len(b)} entries")
    m, rhs, col_order, r = _eliminate(a, b)
    if any(rhs[i] != 0 for i in range(r, a.rows)):
        return LinearSolution("inconsistent", r, None)
    x = [Fraction(0)] * a.cols
    for i in range(r):
        pc = col_order[i]
        x[pc] = rhs[i] / m[i][pc]
    free = tuple(sorted(col_order[r:]))
    status = "unique" if r == a.cols else "underdetermined"
    return LinearSolution(status, r, tuple(x), free)
