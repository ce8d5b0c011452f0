"""Perfect-information extensive-form games.

Edges are identified by the child node they lead to, so every node name in a
tree must be unique. Player 0 is nature; its branches carry weights.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .multilinear import MultilinearPoly, PolySystem
from .normalform import NormalFormGame
from .polygraph import PolynomialGraph, validate_graph

DEFAULT_PROFILE_CAP = 200_000


class TreeError(ValueError):
    pass


class StrategySpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Node:
    name: str
    player: int | None = None  # None for leaves, 0 for nature
    children: tuple["Node", ...] = ()
    weights: tuple[Fraction, ...] = ()
    payoffs: tuple[Fraction, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.player is None

    @property
    def is_chance(self) -> bool:
        return self.player == 0


def leaf(name: str, *payoffs) -> Node:
    return Node(name, None, payoffs=tuple(Fraction(p) for p in payoffs))


def decision(name: str, player: int, *children: Node) -> Node:
    return Node(name, player, tuple(children))


def chance(name: str, branches: Sequence[tuple[object, Node]]) -> Node:
    return Node(name, 0, tuple(c for _, c in branches),
                weights=tuple(Fraction(w) for w, _ in branches))


@dataclass(frozen=True)
class GameTree:
    n_players: int
    root: Node
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        index: dict[str, tuple[Node, Node | None]] = {}
        for node, parent in self._walk(self.root, None):
            if node.name in index:
                raise TreeError(f"duplicate node name {node.name!r}")
            index[node.name] = (node, parent)
            if node.is_leaf:
                if node.children:
                    raise TreeError(f"leaf {node.name!r} has children")
                if len(node.payoffs) != self.n_players:
                    raise TreeError(f"leaf {node.name!r} has {len(node.payoffs)} payoffs, "
                                    f"expected {self.n_players}")
            else:
                if not node.children:
                    raise TreeError(f"non-leaf {node.name!r} has no children")
                if not 0 <= node.player <= self.n_players:
                    raise TreeError(f"node {node.name!r} has bad player {node.player}")
                if node.is_chance:
                    if len(node.weights) != len(node.children):
                        raise TreeError(f"chance node {node.name!r} needs one weight per branch")
                    if any(w <= 0 for w in node.weights) or sum(node.weights) != 1:
                        raise TreeError(f"chance weights at {node.name!r} must be positive "
                                        f"and sum to 1")
        object.__setattr__(self, "_index", index)

    @staticmethod
    def _walk(node: Node, parent: Node | None) -> Iterator[tuple[Node, Node | None]]:
        stack = [(node, parent)]
        while stack:
            n, p = stack.pop()
            yield n, p
            for c in reversed(n.children):
                stack.append((c, n))

    def nodes(self) -> list[Node]:
        """Nodes in preorder."""
        return [n for n, _ in self._walk(self.root, None)]

    def node(self, name: str) -> Node:
        return self._index[name][0]

    def parent(self, name: str) -> Node | None:
        return self._index[name][1]

    def decision_nodes(self, player: int | None = None) -> list[Node]:
        return [n for n in self.nodes() if not n.is_leaf and not n.is_chance
                and (player is None or n.player == player)]

    def path(self, name: str) -> list[Node]:
        """Nodes from the root down to ``name`` inclusive."""
        out = []
        cur = self.node(name)
        while cur is not None:
            out.append(cur)
            cur = self.parent(cur.name)
        return out[::-1]


def collapse_chance_leaves(t: GameTree) -> GameTree:
    """Replace chance nodes whose children are all leaves by expected-payoff leaves."""

    def rebuild(node: Node) -> Node:
        if node.is_leaf:
            return node
        kids = tuple(rebuild(c) for c in node.children)
        if node.is_chance and all(k.is_leaf for k in kids):
            pay = tuple(sum((w * k.payoffs[i] for w, k in zip(node.weights, kids)), Fraction(0))
                        for i in range(t.n_players))
            return Node(node.name, None, payoffs=pay)
        return Node(node.name, node.player, kids, node.weights, node.payoffs)

    return GameTree(t.n_players, rebuild(t.root))


# -- distinguished edges ----------------------------------------------------

def first_edges(t: GameTree) -> dict[str, str]:
    """Default baseline edge at every decision node: its first child."""
    return {n.name: n.children[0].name for n in t.decision_nodes()}


def parse_distinguished(t: GameTree, spec: str | Mapping[str, str] | None) -> dict[str, str]:
    """``"first"``/None, a mapping, or ``"A=C,C=D"`` overriding the default."""
    dist = first_edges(t)
    if spec is None or spec == "first":
        return dist
    if isinstance(spec, str):
        pairs = {}
        for item in spec.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise TreeError(f"bad distinguished-edge entry {item!r}; use NODE=CHILD")
            k, v = item.split("=", 1)
            pairs[k.strip()] = v.strip()
        spec = pairs
    for k, v in spec.items():
        if k not in dist:
            raise TreeError(f"{k!r} is not a decision node")
        if v not in [c.name for c in t.node(k).children]:
            raise TreeError(f"{v!r} is not a child of {k!r}")
        dist[k] = v
    return dist


# -- normal form --------------------------------------------------------------

def pure_strategies(t: GameTree, player: int) -> list[tuple[str, ...]]:
    """All choices of one child per node where ``player`` moves (preorder)."""
    nodes = t.decision_nodes(player)
    return [tuple(choice) for choice in
            itertools.product(*([c.name for c in n.children] for n in nodes))]


def leaf_distribution(t: GameTree, choice: Mapping[str, str]) -> dict[str, Fraction]:
    """Pr[leaf | s] for a pure profile given as node -> chosen child."""
    out: dict[str, Fraction] = {}

    def go(node: Node, prob: Fraction):
        if node.is_leaf:
            out[node.name] = out.get(node.name, Fraction(0)) + prob
        elif node.is_chance:
            for w, c in zip(node.weights, node.children):
                go(c, prob * w)
        else:
            pick = choice[node.name]
            for c in node.children:
                if c.name == pick:
                    go(c, prob)

    go(t.root, Fraction(1))
    return out


def normal_form_of(t: GameTree, cap: int = DEFAULT_PROFILE_CAP) -> NormalFormGame:
    """Full (unreduced) normal form: a pure strategy picks an edge at every own node.

    Strategies that differ only at unreachable nodes are kept as distinct
    strategies with equal payoffs.
    """
    strategies = [pure_strategies(t, i) for i in range(1, t.n_players + 1)]
    counts = tuple(len(s) for s in strategies)
    if math.prod(counts) > cap:
        raise StrategySpaceTooLarge(f"{math.prod(counts)} pure profiles exceed cap {cap}")
    nodes_of = [[n.name for n in t.decision_nodes(i)] for i in range(1, t.n_players + 1)]
    leaves = {n.name: n for n in t.nodes() if n.is_leaf}
    tables = [[] for _ in range(t.n_players)]
    for rev in itertools.product(*(range(c) for c in reversed(counts))):
        prof = rev[::-1]
        choice = {}
        for i, k in enumerate(prof):
            choice.update(zip(nodes_of[i], strategies[i][k]))
        dist = leaf_distribution(t, choice)
        for i in range(t.n_players):
            tables[i].append(sum((p * leaves[lam].payoffs[i] for lam, p in dist.items()),
                                 Fraction(0)))
    labels = tuple(tuple(",".join(f"{a}:{b}" for a, b in zip(nodes_of[i], s)) or "-"
                         for s in strategies[i]) for i in range(t.n_players))
    return NormalFormGame(counts, tuple(tuple(tb) for tb in tables), labels)


# -- backward induction ---------------------------------------------------------

@dataclass(frozen=True)
class BackwardInductionResult:
    choices: dict[str, str]
    value: tuple[Fraction, ...]
    ties: tuple[str, ...]

    def by_player(self, t: GameTree) -> dict[int, dict[str, str]]:
        out: dict[int, dict[str, str]] = {}
        for n in t.decision_nodes():
            out.setdefault(n.player, {})[n.name] = self.choices[n.name]
        return out


def backward_induction_pure(t: GameTree) -> BackwardInductionResult:
    """Subgame-perfect pure profile; ties go to the lowest branch index."""
    choices: dict[str, str] = {}
    ties: list[str] = []

    def solve(node: Node) -> tuple[Fraction, ...]:
        if node.is_leaf:
            return node.payoffs
        values = [solve(c) for c in node.children]
        if node.is_chance:
            return tuple(sum((w * v[i] for w, v in zip(node.weights, values)), Fraction(0))
                         for i in range(t.n_players))
        i = node.player - 1
        best = max(v[i] for v in values)
        winners = [k for k, v in enumerate(values) if v[i] == best]
        if len(winners) > 1:
            ties.append(node.name)
        choices[node.name] = node.children[winners[0]].name
        return values[winners[0]]

    value = solve(t.root)
    return BackwardInductionResult(choices, value, tuple(ties))


# -- polynomial graph and subgame equations -------------------------------------

def edge_variable(t: GameTree, child: str) -> str:
    parent = t.parent(child)
    return f"s{parent.player}({child})"


def _variable_layout(t: GameTree, dist: Mapping[str, str]):
    """Vertex ids for non-distinguished edges, grouped by decision node."""
    names: list[str] = []
    blocks: list[list[int]] = []
    vid: dict[str, int] = {}
    for n in t.decision_nodes():
        blk = []
        for c in n.children:
            if c.name == dist[n.name]:
                continue
            vid[c.name] = len(names)
            blk.append(len(names))
            names.append(edge_variable(t, c.name))
        if blk:
            blocks.append(blk)
    return names, blocks, vid


def polynomial_graph_of(t: GameTree, dist: Mapping[str, str] | None = None) -> PolynomialGraph:
    """The acyclic polynomial graph over non-distinguished edges.

    n_e (edge e at nu, player i) -> n_e' (edge at mu, player j) iff i != j,
    nu is a proper ancestor of mu, the path nu -> mu starts with e or with
    the baseline edge at nu, and at every node strictly between them where i
    moves the path follows i's baseline edge.
    """
    if not t.decision_nodes():
        raise TreeError("tree has no decision nodes")
    dist = dict(dist or first_edges(t))
    names, blocks, vid = _variable_layout(t, dist)
    edges = []
    for mu in t.decision_nodes():
        targets = [vid[c.name] for c in mu.children if c.name in vid]
        if not targets:
            continue
        path = t.path(mu.name)
        for a, nu in enumerate(path[:-1]):
            if nu.is_chance or nu.player == mu.player:
                continue
            i = nu.player
            ok = all(path[b + 1].name == dist[path[b].name]
                     for b in range(a + 1, len(path) - 1)
                     if not path[b].is_chance and path[b].player == i)
            if not ok:
                continue
            first = path[a + 1].name
            if first == dist[nu.name]:
                sources = [vid[c.name] for c in nu.children if c.name in vid]
            elif first in vid:
                sources = [vid[first]]
            else:
                sources = []
            edges.extend((s, k) for s in sources for k in targets)
    return validate_graph(blocks, edges, names)


def _subtree_value(t: GameTree, node: Node, i: int, dist: Mapping[str, str],
                   vid: Mapping[str, int]) -> MultilinearPoly:
    """Expected payoff to player i below ``node`` when i follows baselines."""
    if node.is_leaf:
        return MultilinearPoly.constant(node.payoffs[i - 1])
    if node.is_chance:
        total = MultilinearPoly()
        for w, c in zip(node.weights, node.children):
            total = total + _subtree_value(t, c, i, dist, vid) * w
        return total
    base_child = t.node(dist[node.name])
    base = _subtree_value(t, base_child, i, dist, vid)
    if node.player == i:
        return base
    total = base
    for c in node.children:
        if c.name == base_child.name:
            continue
        diff = _subtree_value(t, c, i, dist, vid) - base
        total = total + MultilinearPoly.var(vid[c.name]) * diff
    return total


def subgame_system(t: GameTree, dist: Mapping[str, str] | None = None) -> PolySystem:
    """One indifference equation per non-distinguished edge e at node nu.

    The equation compares, in the subgame below nu, the acting player's
    payoff from e against the baseline edge, with that player following
    baselines further down and everyone else mixing.
    """
    dist = dict(dist or first_edges(t))
    names, blocks, vid = _variable_layout(t, dist)
    equations: list[MultilinearPoly] = [MultilinearPoly()] * len(names)
    labels = [""] * len(names)
    for nu in t.decision_nodes():
        i = nu.player
        base = _subtree_value(t, t.node(dist[nu.name]), i, dist, vid)
        for c in nu.children:
            if c.name not in vid:
                continue
            equations[vid[c.name]] = _subtree_value(t, c, i, dist, vid) - base
            labels[vid[c.name]] = f"{nu.name}->{c.name}"
    return PolySystem(tuple(names), tuple(tuple(b) for b in blocks), tuple(equations),
                      tuple(labels))


def behavior_point(t: GameTree, sys: PolySystem, probabilities: Mapping[str, object],
                   dist: Mapping[str, str] | None = None) -> dict[int, Fraction]:
    """Map edge probabilities keyed by child name onto system variables.

    A baseline edge's probability may stand in for its sibling when the node
    has exactly two branches.
    """
    dist = dict(dist or first_edges(t))
    point: dict[int, Fraction] = {}
    for child, value in probabilities.items():
        value = Fraction(value)
        var = edge_variable(t, child)
        if var in sys.variables:
            point[sys.index(var)] = value
            continue
        parent = t.parent(child)
        if parent is not None and dist.get(parent.name) == child:
            others = [c.name for c in parent.children if c.name != child]
            if len(others) == 1:
                point.setdefault(sys.index(edge_variable(t, others[0])), 1 - value)
                continue
        raise KeyError(f"no variable for edge into {child!r}")
    return point
