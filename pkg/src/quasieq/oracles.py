"""Brute-force cross-checks for the counting and matching fast paths.

These are intentionally naive and share no code with :mod:`quasieq.numerics`
or the Hopcroft-Karp/Ryser routines in :mod:`quasieq.polygraph`.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .numerics import DimensionCapExceeded, permanent_naive
from .polygraph import PolynomialGraph, bernstein_count, has_solution

ORACLE_CAP = 10


class OracleDisagreement(AssertionError):
    pass


@dataclass(frozen=True)
class LinearFormProduct:
    """prod_k (sum_j coeffs[k][j] * lambda_j), one form per column of g."""

    coeffs: tuple[tuple[int, ...], ...]

    @classmethod
    def from_graph(cls, g: PolynomialGraph) -> "LinearFormProduct":
        m = g.incidence()
        return cls(tuple(tuple(m[j][k] for j in range(g.d)) for k in range(g.d)))

    def squarefree_top_coefficient(self) -> int:
        """Coefficient of lambda_1 * ... * lambda_d in the expanded product.

        Expands factor by factor, dropping every monomial in which some
        lambda_j would appear squared (it can never reach the target).
        """
        d = len(self.coeffs)
        partial = {0: 1}  # bitmask of lambdas used -> coefficient
        for form in self.coeffs:
            nxt: dict[int, int] = {}
            for mask, c in partial.items():
                for j, a in enumerate(form):
                    if a and not mask >> j & 1:
                        key = mask | 1 << j
                        nxt[key] = nxt.get(key, 0) + c * a
            partial = nxt
        return partial.get((1 << d) - 1, 0)


def mixed_volume_coefficient(g: PolynomialGraph, cap: int = ORACLE_CAP) -> Fraction:
    """Mixed volume of the block-simplex Newton polytopes of ``g``.

    The volume of lambda_1 P_1 + ... + lambda_d P_d is
    prod_k (sum_j g_jk lambda_j) / prod_i d_i!; the mixed volume is its
    lambda_1...lambda_d coefficient.
    """
    if g.d > cap:
        raise DimensionCapExceeded(g.d, cap, "mixed_volume_coefficient")
    top = LinearFormProduct.from_graph(g).squarefree_top_coefficient()
    return Fraction(top, math.prod(math.factorial(s) for s in g.block_sizes))


def exhaustive_matching(g: PolynomialGraph, cap: int = ORACLE_CAP) -> bool:
    """Try every permutation for a cycle cover j -> pi(j)."""
    if g.d > cap:
        raise DimensionCapExceeded(g.d, cap, "exhaustive_matching")
    for perm in itertools.permutations(range(g.d)):
        if all(perm[j] in g.adjacency[j] for j in range(g.d)):
            return True
    return False


@dataclass(frozen=True)
class CrossCheckReport:
    bernstein_count: int
    mixed_volume: str
    naive_count: str
    has_solution: bool
    exhaustive_matching: bool
    agree: bool
    digest: str


def cross_check_count(g: PolynomialGraph, strict: bool = True) -> CrossCheckReport:
    """Run every counting route on ``g`` and compare.

    ``digest`` is a SHA-256 over the sorted JSON of the other fields so two
    runs can be compared at a glance. With ``strict`` a disagreement raises.
    """
    if g.d > ORACLE_CAP:
        raise DimensionCapExceeded(g.d, ORACLE_CAP, "cross_check_count")
    fast = bernstein_count(g)
    mv = mixed_volume_coefficient(g)
    naive = Fraction(permanent_naive(g.incidence()),
                     math.prod(math.factorial(s) for s in g.block_sizes))
    hk = has_solution(g)
    ex = exhaustive_matching(g)
    agree = (fast.bernstein_count == mv == naive and hk == ex
             and hk == (fast.bernstein_count > 0))
    body = {
        "bernstein_count": fast.bernstein_count,
        "mixed_volume": str(mv),
        "naive_count": str(naive),
        "has_solution": hk,
        "exhaustive_matching": ex,
        "agree": agree,
    }
    digest = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()
    report = CrossCheckReport(digest=digest, **body)
    if strict and not agree:
        raise OracleDisagreement(f"counting routes disagree: {asdict(report)}")
    return report
