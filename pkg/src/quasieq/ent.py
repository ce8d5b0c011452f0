"""Emergent node tree (ENT) structures on normal-form games.

Leaves are the actual players. Every non-leaf, non-root node is an emergent
player whose mixed strategy is a fixed stochastic aggregation of its
children's pure-profile distribution. Utilities combine a local payoff over
the node and its siblings with shares of the utilities of its non-root
ancestors.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .multilinear import PolySystem, residual
from .normalform import GraphicalModel, NormalFormGame, all_profiles, indifference_system, \
    graphical_polygraph, profile_index
from .numerics import RationalMatrix, rank
from .polygraph import PolynomialGraph


class EntError(ValueError):
    pass


@dataclass(frozen=True)
class EntNode:
    """One tree node.

    ``aggregation`` (emergent nodes only) lists, for every pure profile of the
    children (first child fastest), the distribution over this node's
    strategies. ``payoffs`` is U_v over (own strategy, siblings in the
    parent's child order), first coordinate fastest. ``gamma`` maps non-root
    ancestor names to share coefficients.
    """

    name: str
    parent: str | None
    strategies: int = 0
    aggregation: tuple[tuple[Fraction, ...], ...] = ()
    gamma: Mapping[str, Fraction] = field(default_factory=dict)
    payoffs: tuple[Fraction, ...] = ()


class EntStructure:
    def __init__(self, nodes: Sequence[EntNode]):
        self.nodes = tuple(nodes)
        self._by_name = {}
        for n in self.nodes:
            if n.name in self._by_name:
                raise EntError(f"duplicate node {n.name!r}")
            self._by_name[n.name] = n
        roots = [n.name for n in self.nodes if n.parent is None]
        if len(roots) != 1:
            raise EntError(f"expected exactly one root, found {roots}")
        self.root = roots[0]
        self.children: dict[str, list[str]] = {n.name: [] for n in self.nodes}
        for n in self.nodes:
            if n.parent is not None:
                if n.parent not in self._by_name:
                    raise EntError(f"{n.name!r} has unknown parent {n.parent!r}")
                self.children[n.parent].append(n.name)
        # every node must reach the root
        for n in self.nodes:
            seen = set()
            cur = n.name
            while cur is not None:
                if cur in seen:
                    raise EntError(f"cycle through {cur!r}")
                seen.add(cur)
                cur = self._by_name[cur].parent
        self._check_shapes()

    def _check_shapes(self):
        for n in self.nonroot():
            if n.strategies < 1:
                raise EntError(f"node {n.name!r} needs a positive strategy count")
            if self.is_emergent(n.name):
                width = math.prod(self[c].strategies for c in self.children[n.name])
                if len(n.aggregation) != width:
                    raise EntError(f"emergent node {n.name!r}: aggregation needs {width} rows")
                if any(len(row) != n.strategies for row in n.aggregation):
                    raise EntError(f"emergent node {n.name!r}: aggregation rows need "
                                   f"{n.strategies} entries")
            elif n.aggregation:
                raise EntError(f"leaf {n.name!r} cannot have an aggregation table")
            size = math.prod(self.local_counts(n.name))
            if len(n.payoffs) != size:
                raise EntError(f"node {n.name!r}: expected {size} local payoffs, "
                               f"got {len(n.payoffs)}")
            allowed = set(self.nonroot_ancestors(n.name))
            bad = set(n.gamma) - allowed
            if bad:
                raise EntError(f"node {n.name!r}: gamma refers to non-ancestors {sorted(bad)}")

    def __getitem__(self, name: str) -> EntNode:
        return self._by_name[name]

    def nonroot(self) -> list[EntNode]:
        return [n for n in self.nodes if n.parent is not None]

    def leaves(self) -> list[str]:
        return [n.name for n in self.nodes if not self.children[n.name]]

    def is_emergent(self, name: str) -> bool:
        return name != self.root and bool(self.children[name])

    def emergent(self) -> list[str]:
        return [n.name for n in self.nodes if self.is_emergent(n.name)]

    def siblings(self, name: str) -> list[str]:
        parent = self[name].parent
        if parent is None:
            return []
        return [c for c in self.children[parent] if c != name]

    def nonroot_ancestors(self, name: str) -> list[str]:
        out = []
        cur = self[name].parent
        while cur is not None and cur != self.root:
            out.append(cur)
            cur = self[cur].parent
        return out

    def local_counts(self, name: str) -> list[int]:
        return [self[name].strategies] + [self[s].strategies for s in self.siblings(name)]

    def aggregation_matrix(self, name: str) -> RationalMatrix:
        """|S_v| x prod|S_w| matrix of p_v(k, s)."""
        rows = self[name].aggregation
        return RationalMatrix.from_rows([[r[k] for r in rows]
                                         for k in range(self[name].strategies)])


@dataclass(frozen=True)
class EntReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_ent(e: EntStructure) -> EntReport:
    """List violations of the strategy-count bound and of the aggregation map (rows, rank)."""
    found = []
    for v in e.emergent():
        node = e[v]
        width = math.prod(e[c].strategies for c in e.children[v])
        if node.strategies > width:
            found.append(f"{v}: |S_v|={node.strategies} exceeds product of children's "
                         f"strategy counts {width}")
        for k, row in enumerate(node.aggregation):
            if any(x < 0 for x in row) or sum(row) != 1:
                found.append(f"{v}: aggregation row {k} is not a distribution (sum {sum(row)})")
        r = rank(e.aggregation_matrix(v))
        if r < node.strategies:
            found.append(f"{v}: aggregation map has rank {r} < {node.strategies}")
    return EntReport(tuple(found))


def _as_vector(value, n: int) -> tuple[Fraction, ...]:
    """A distribution, or for two strategies the probability of strategy 1."""
    if isinstance(value, (list, tuple)):
        vec = tuple(Fraction(x) for x in value)
    else:
        if n != 2:
            raise EntError("scalar strategies are only allowed for two-strategy nodes")
        p = Fraction(value)
        vec = (1 - p, p)
    if len(vec) != n:
        raise EntError(f"expected {n} probabilities, got {len(vec)}")
    return vec


def aggregate(e: EntStructure, v: str,
              profile: Mapping[str, Sequence[Fraction]]) -> tuple[Fraction, ...]:
    """sigma_v(k) = sum_s p_v(k, s) prod_w sigma_w(s_w) over children's profiles s."""
    kids = e.children[v]
    counts = [e[c].strategies for c in kids]
    node = e[v]
    acc = [Fraction(0)] * node.strategies
    for s, row in zip(all_profiles(counts), node.aggregation):
        prob = Fraction(1)
        for c, sc in zip(kids, s):
            prob *= profile[c][sc]
            if not prob:
                break
        if prob:
            for k in range(node.strategies):
                acc[k] += prob * row[k]
    return tuple(acc)


def emergent_profile(e: EntStructure, leaves: Mapping[str, object]) -> dict[str, tuple[Fraction, ...]]:
    """Strategies of every non-root node, aggregated bottom-up from the leaves."""
    out = {name: _as_vector(leaves[name], e[name].strategies) for name in e.leaves()}

    def compute(v: str):
        if v not in out:
            for c in e.children[v]:
                compute(c)
            out[v] = aggregate(e, v, out)

    for v in e.emergent():
        compute(v)
    return out


def _local_expectation(e: EntStructure, v: str, profile: Mapping[str, Sequence[Fraction]]) -> Fraction:
    involved = [v] + e.siblings(v)
    counts = e.local_counts(v)
    total = Fraction(0)
    for s in all_profiles(counts):
        prob = Fraction(1)
        for name, k in zip(involved, s):
            prob *= profile[name][k]
            if not prob:
                break
        if prob:
            total += prob * e[v].payoffs[profile_index(s, counts)]
    return total


def ent_utility(e: EntStructure, v: str, profile: Mapping[str, Sequence[Fraction]]) -> Fraction:
    """u_v = U_v(sigma_v, sigma_siblings) + sum_w gamma_vw u_w, ancestors first."""
    if v == e.root:
        raise EntError("the root has no utility")
    total = _local_expectation(e, v, profile)
    for w, g in e[v].gamma.items():
        if g:
            total += Fraction(g) * ent_utility(e, w, profile)
    return total


def induced_normal_form(e: EntStructure) -> NormalFormGame:
    """The actual game among the leaves, payoffs read off ``ent_utility``."""
    leaves = e.leaves()
    counts = tuple(e[name].strategies for name in leaves)
    tables = [[] for _ in leaves]
    for s in all_profiles(counts):
        pure = {name: tuple(Fraction(int(k == sk)) for k in range(e[name].strategies))
                for name, sk in zip(leaves, s)}
        prof = emergent_profile(e, pure)
        for i, name in enumerate(leaves):
            tables[i].append(ent_utility(e, name, prof))
    return NormalFormGame(counts, tuple(tuple(t) for t in tables))


@dataclass(frozen=True)
class RelaxedModel:
    players: tuple[str, ...]
    model: GraphicalModel
    graph: PolynomialGraph


def relaxed_graphical_model(e: EntStructure) -> RelaxedModel:
    """Treat emergent nodes as actual players.

    Each non-root node points at its siblings, its parent (when that is not
    the root) and every other non-root ancestor. Local payoffs keep only
    U_v: the shared ancestor terms do not depend on v's own strategy and
    drop out of every indifference equation.
    """
    players = tuple(n.name for n in e.nonroot())
    pos = {name: i for i, name in enumerate(players)}
    neighbors = []
    tables = []
    for name in players:
        sib = e.siblings(name)
        anc = e.nonroot_ancestors(name)
        nbrs = [pos[s] for s in sib] + [pos[a] for a in anc]
        neighbors.append(tuple(nbrs))
        # pad U_v over the ancestor coordinates, on which it is constant
        local_counts = e.local_counts(name)
        anc_counts = [e[a].strategies for a in anc]
        full = []
        for s in all_profiles(local_counts + anc_counts):
            full.append(e[name].payoffs[profile_index(s[:len(local_counts)], local_counts)])
        tables.append(tuple(full))
    model = GraphicalModel(tuple(e[p].strategies for p in players), tuple(neighbors),
                           tuple(tables))
    graph = graphical_polygraph(model)
    labels = []
    for p in players:
        labels.extend(f"s{p}_{k}" for k in range(1, e[p].strategies))
    graph = dataclasses.replace(graph, labels=tuple(labels))
    return RelaxedModel(players, model, graph)


def relaxed_system(e: EntStructure) -> PolySystem:
    """Indifference system of the relaxed model; aggregation constraints are left out.

    Variable ``s{v}_{k}`` is the probability node v plays strategy k >= 1.
    """
    rm = relaxed_graphical_model(e)
    sys = indifference_system(rm.model)
    names = []
    for p in rm.players:
        names.extend(f"s{p}_{k}" for k in range(1, e[p].strategies))
    labels = []
    for p in rm.players:
        labels.extend(f"u{p}({k})-u{p}(0)" for k in range(1, e[p].strategies))
    return PolySystem(tuple(names), sys.blocks, sys.equations, tuple(labels))


def profile_point(e: EntStructure, sys: PolySystem,
                  profile: Mapping[str, Sequence[Fraction]]) -> dict[int, Fraction]:
    point = {}
    for v, vec in profile.items():
        for k in range(1, len(vec)):
            point[sys.index(f"s{v}_{k}")] = vec[k]
    return point


@dataclass(frozen=True)
class HierarchicalReport:
    profile: dict[str, tuple[Fraction, ...]]
    relaxed_residuals: tuple[Fraction, ...]
    consistency_residuals: dict[str, tuple[Fraction, ...]]
    totally_mixed: bool
    not_mixed: tuple[str, ...]

    @property
    def all_zero(self) -> bool:
        return (not any(self.relaxed_residuals)
                and not any(any(r) for r in self.consistency_residuals.values()))


def hierarchical_residual(e: EntStructure, leaves: Mapping[str, object],
                          asserted: Mapping[str, object] | None = None) -> HierarchicalReport:
    """Residuals of a candidate hierarchically perfect totally mixed quasiequilibrium.

    Emergent strategies are aggregated from ``leaves``; ``asserted`` values,
    when given, replace them in the relaxed equations and are compared with
    the aggregation in the consistency residuals.
    """
    derived = emergent_profile(e, leaves)
    profile = dict(derived)
    for v, value in (asserted or {}).items():
        if not e.is_emergent(v):
            raise EntError(f"{v!r} is not an emergent node")
        profile[v] = _as_vector(value, e[v].strategies)
    sys = relaxed_system(e)
    rel = residual(sys, profile_point(e, sys, profile))
    cons = {v: tuple(a - b for a, b in zip(profile[v], aggregate(e, v, profile)))
            for v in e.emergent()}
    not_mixed = tuple(v for v, vec in profile.items() if any(x <= 0 for x in vec))
    return HierarchicalReport(profile, tuple(rel), cons, not not_mixed, not_mixed)
