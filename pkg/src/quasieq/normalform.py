"""Normal-form and graphical games with their indifference systems."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .multilinear import MultilinearPoly, PolySystem, dehomogenize
from .polygraph import PolynomialGraph, validate_graph


class DegeneratePlayerError(ValueError):
    pass


def profile_index(profile: Sequence[int], counts: Sequence[int]) -> int:
    """Row-major index of a pure profile, first coordinate fastest."""
    idx, stride = 0, 1
    for s, n in zip(profile, counts):
        idx += s * stride
        stride *= n
    return idx


def all_profiles(counts: Sequence[int]):
    """Pure profiles in storage order (first coordinate fastest)."""
    for rev in itertools.product(*(range(n) for n in reversed(counts))):
        yield tuple(reversed(rev))


@dataclass(frozen=True)
class NormalFormGame:
    """Payoff tensors stored densely; ``payoffs[i][profile_index(s)]`` is u_i(s)."""

    strategy_counts: tuple[int, ...]
    payoffs: tuple[tuple[Fraction, ...], ...]
    strategy_labels: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        size = math.prod(self.strategy_counts)
        if len(self.payoffs) != len(self.strategy_counts):
            raise ValueError("need one payoff table per player")
        for i, table in enumerate(self.payoffs):
            if len(table) != size:
                raise ValueError(f"player {i + 1}: expected {size} payoffs, got {len(table)}")

    @property
    def n_players(self) -> int:
        return len(self.strategy_counts)

    def payoff(self, i: int, profile: Sequence[int]) -> Fraction:
        return self.payoffs[i][profile_index(profile, self.strategy_counts)]


@dataclass(frozen=True)
class GraphicalModel:
    """A game whose payoff to player i depends on i and i's out-neighbours only.

    ``local_payoffs[i]`` is indexed by the profile (own strategy, then the
    strategies of ``neighbors[i]`` in listed order), first coordinate fastest.
    """

    strategy_counts: tuple[int, ...]
    neighbors: tuple[tuple[int, ...], ...]
    local_payoffs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.strategy_counts)
        if len(self.neighbors) != n or len(self.local_payoffs) != n:
            raise ValueError("need neighbours and a payoff table for every player")
        for i, nbrs in enumerate(self.neighbors):
            if i in nbrs:
                raise ValueError(f"player {i + 1} lists itself as a neighbour")
            if any(not 0 <= j < n for j in nbrs) or len(set(nbrs)) != len(nbrs):
                raise ValueError(f"player {i + 1}: bad neighbour list {nbrs}")
            size = math.prod(self.local_counts(i))
            if len(self.local_payoffs[i]) != size:
                raise ValueError(f"player {i + 1}: expected {size} local payoffs, "
                                 f"got {len(self.local_payoffs[i])}")

    @property
    def n_players(self) -> int:
        return len(self.strategy_counts)

    def local_counts(self, i: int) -> list[int]:
        return [self.strategy_counts[i]] + [self.strategy_counts[j] for j in self.neighbors[i]]

    def local_payoff(self, i: int, own: int, others: Sequence[int]) -> Fraction:
        """u_i at a full pure profile ``others`` (entry i ignored) with i playing ``own``."""
        key = [own] + [others[j] for j in self.neighbors[i]]
        return self.local_payoffs[i][profile_index(key, self.local_counts(i))]

    def to_normal_form(self) -> NormalFormGame:
        counts = self.strategy_counts
        tables = []
        for i in range(self.n_players):
            tables.append(tuple(self.local_payoff(i, s[i], s) for s in all_profiles(counts)))
        return NormalFormGame(counts, tuple(tables))


def random_normal_form(counts: Sequence[int], rng: random.Random | int = 0,
                       low: int = -10, high: int = 10) -> NormalFormGame:
    """Integer payoffs drawn uniformly from [low, high] with a seeded PRNG."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    size = math.prod(counts)
    tables = tuple(tuple(Fraction(rng.randint(low, high)) for _ in range(size))
                   for _ in counts)
    return NormalFormGame(tuple(counts), tables)


def random_graphical(counts: Sequence[int], neighbors: Sequence[Sequence[int]],
                     rng: random.Random | int = 0, low: int = -10,
                     high: int = 10) -> GraphicalModel:
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    neighbors = tuple(tuple(n) for n in neighbors)
    tables = []
    for i in range(len(counts)):
        size = counts[i] * math.prod(counts[j] for j in neighbors[i])
        tables.append(tuple(Fraction(rng.randint(low, high)) for _ in range(size)))
    return GraphicalModel(tuple(counts), neighbors, tuple(tables))


@dataclass(frozen=True)
class MixedProfile:
    strategies: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def of(cls, *vectors: Sequence) -> "MixedProfile":
        return cls(tuple(tuple(Fraction(x) for x in v) for v in vectors))

    @classmethod
    def pure(cls, profile: Sequence[int], counts: Sequence[int]) -> "MixedProfile":
        return cls(tuple(tuple(Fraction(int(k == s)) for k in range(n))
                         for s, n in zip(profile, counts)))

    @classmethod
    def uniform(cls, counts: Sequence[int]) -> "MixedProfile":
        return cls(tuple(tuple(Fraction(1, n) for _ in range(n)) for n in counts))

    def is_distribution(self) -> bool:
        return all(sum(v) == 1 and all(x >= 0 for x in v) for v in self.strategies)

    def is_totally_mixed(self) -> bool:
        return self.is_distribution() and all(x > 0 for v in self.strategies for x in v)


def expected_utility(g: NormalFormGame | GraphicalModel, i: int,
                     profile: MixedProfile) -> Fraction:
    """u_i(sigma) = sum_s u_i(s) prod_k sigma_k(s_k), exactly."""
    counts = g.strategy_counts
    if len(profile.strategies) != len(counts) or any(
            len(v) != n for v, n in zip(profile.strategies, counts)):
        raise ValueError("profile dimensions do not match the game")
    if isinstance(g, GraphicalModel):
        involved = [i] + list(g.neighbors[i])
        total = Fraction(0)
        sub = [counts[k] for k in involved]
        for local in all_profiles(sub):
            prob = Fraction(1)
            for k, s in zip(involved, local):
                prob *= profile.strategies[k][s]
                if not prob:
                    break
            if prob:
                total += prob * g.local_payoffs[i][profile_index(local, sub)]
        return total
    total = Fraction(0)
    for s, u in zip(all_profiles(counts), g.payoffs[i]):
        prob = Fraction(1)
        for k, sk in enumerate(s):
            prob *= profile.strategies[k][sk]
            if not prob:
                break
        if prob:
            total += prob * u
    return total


def strategy_variables(counts: Sequence[int]) -> tuple[list[str], list[list[int]]]:
    """Names and blocks of the full (homogeneous) strategy variables."""
    names, blocks = [], []
    for i, n in enumerate(counts):
        blocks.append(list(range(len(names), len(names) + n)))
        names.extend(f"x{i + 1}_{k}" for k in range(n))
    return names, blocks


def _payoff_difference_poly(g, i: int, j: int, full_blocks) -> MultilinearPoly:
    """u_i(s_ij, sigma_-i) - u_i(s_i0, sigma_-i) over the full strategy variables."""
    counts = g.strategy_counts
    if isinstance(g, GraphicalModel):
        opponents = list(g.neighbors[i])
    else:
        opponents = [k for k in range(len(counts)) if k != i]
    poly = MultilinearPoly()
    for sub in itertools.product(*(range(counts[k]) for k in opponents)):
        full = [0] * len(counts)
        for k, s in zip(opponents, sub):
            full[k] = s
        if isinstance(g, GraphicalModel):
            diff = g.local_payoff(i, j, full) - g.local_payoff(i, 0, full)
        else:
            full[i] = j
            hi = g.payoff(i, full)
            full[i] = 0
            diff = hi - g.payoff(i, full)
        if not diff:
            continue
        mono = frozenset(full_blocks[k][s] for k, s in zip(opponents, sub))
        poly = poly + MultilinearPoly({mono: diff})
    return poly


def homogeneous_indifference(g: NormalFormGame | GraphicalModel):
    """Indifference polynomials before eliminating s_i0.

    Returns (names, blocks, [(player, strategy, poly)]).
    """
    counts = g.strategy_counts
    for i, n in enumerate(counts):
        if n < 2:
            raise DegeneratePlayerError(f"player {i + 1} has a single strategy")
    names, blocks = strategy_variables(counts)
    eqs = [(i, j, _payoff_difference_poly(g, i, j, blocks))
           for i, n in enumerate(counts) for j in range(1, n)]
    return names, blocks, eqs


def indifference_system(g: NormalFormGame | GraphicalModel) -> PolySystem:
    """Dehomogenized indifference equations u_i(s_ij) - u_i(s_i0) = 0, j >= 1.

    Variable ``x{i}_{j}`` is the probability of player i's strategy j; the
    probability of strategy 0 is eliminated.
    """
    names, full_blocks, eqs = homogeneous_indifference(g)
    reduced: dict[int, int] = {}
    red_names: list[str] = []
    red_blocks: list[tuple[int, ...]] = []
    for blk in full_blocks:
        members = []
        for v in blk[1:]:
            reduced[v] = len(red_names)
            members.append(len(red_names))
            red_names.append(names[v])
        red_blocks.append(tuple(members))
    equations = []
    labels = []
    for i, j, poly in eqs:
        equations.append(dehomogenize(poly, full_blocks).rename(reduced))
        labels.append(f"u{i + 1}({j})-u{i + 1}(0)")
    return PolySystem(tuple(red_names), tuple(red_blocks), tuple(equations), tuple(labels))


def _player_graph(counts: Sequence[int], has_edge) -> PolynomialGraph:
    labels, blocks = [], []
    owner = []
    for i, n in enumerate(counts):
        if n < 2:
            continue  # a single-strategy player contributes no variables
        blocks.append(list(range(len(labels), len(labels) + n - 1)))
        for k in range(1, n):
            labels.append(f"x{i + 1}_{k}")
            owner.append(i)
    edges = [(a, b) for a in range(len(labels)) for b in range(len(labels))
             if has_edge(owner[a], owner[b])]
    return validate_graph(blocks, edges, labels)


def complete_polygraph(g: NormalFormGame | Sequence[int]) -> PolynomialGraph:
    """Vertices s_ik (k >= 1); edge s_ik -> s_jl iff i != j."""
    counts = g.strategy_counts if hasattr(g, "strategy_counts") else tuple(g)
    return _player_graph(counts, lambda i, j: i != j)


def graphical_polygraph(m: GraphicalModel) -> PolynomialGraph:
    """Edge s_ik -> s_jl iff the model has an edge i -> j."""
    nbrs = [set(n) for n in m.neighbors]
    return _player_graph(m.strategy_counts, lambda i, j: j in nbrs[i])
